#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "muw/learning.hpp"
#include "muw/scenegen.hpp"
#include "support.hpp"

using namespace muw;

namespace {

std::vector<Instance> column(const std::string& dim, const std::vector<Value>& values) {
  std::vector<Instance> out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    Instance inst;
    inst.id = "i" + std::to_string(i);
    inst.values[dim] = values[i];
    inst.label = "C";
    out.push_back(std::move(inst));
  }
  return out;
}

std::vector<Value> numbers(const std::vector<double>& xs) { return {xs.begin(), xs.end()}; }
std::vector<Value> words(const std::vector<std::string>& xs) { return {xs.begin(), xs.end()}; }

}  // namespace

TEST_CASE("learn_prototype: mean, mode, identity") {
  const auto cont = DimensionSpec::continuous("x", "d", 0.0, 10.0);
  const auto nom = DimensionSpec::nominal("colour", "colour", {"green", "red"});
  CHECK(std::get<double>(learn_prototype(column("x", numbers({2, 4})), cont)) == 3.0);
  CHECK(std::get<std::string>(learn_prototype(column("colour", words({"red", "red", "green"})), nom)) == "red");
  CHECK(std::get<double>(learn_prototype(column("x", numbers({7.2})), cont)) == 7.2);
  CHECK_THROWS_AS(learn_prototype({}, cont), Error);
}

TEST_CASE("learn_prototype breaks mode ties lexicographically") {
  const auto nom = DimensionSpec::nominal("s", "shape", {"box", "pistol"});
  CHECK(std::get<std::string>(learn_prototype(column("s", words({"pistol", "box"})), nom)) == "box");
}

TEST_CASE("estimate_membership: gaussian peak and one width") {
  const auto spec = DimensionSpec::continuous("x", "d", 0.0, 1.0);
  const auto data = column("x", numbers({0.4, 0.5, 0.6}));
  const auto mf = estimate_membership(data, spec, {0.0, 1.0});
  const auto& g = std::get<GaussianMembership>(mf.shape);
  CHECK(g.center == doctest::Approx(0.5).epsilon(1e-15));
  // sample std of {0.4, 0.5, 0.6} is 0.1
  CHECK(g.width == doctest::Approx(0.1).epsilon(1e-12));
  const double at_width = std::exp(-0.5);
  CHECK(at_width == doctest::Approx(0.6065306597).epsilon(1e-9));
}

TEST_CASE("estimate_membership: width floored for constant data") {
  const auto spec = DimensionSpec::continuous("x", "d", 0.0, 1.0);
  const auto mf = estimate_membership(column("x", numbers({0.3, 0.3, 0.3})), spec, {0.0, 1.0});
  CHECK(std::get<GaussianMembership>(mf.shape).width == kDefaultWidthMin);
}

TEST_CASE("estimate_membership: nominal frequency ratio") {
  const auto spec = DimensionSpec::nominal("procreation", "biology", {"lays_eggs", "live_birth", "spores"});
  std::vector<std::string> vals(9, "lays_eggs");
  vals.push_back("live_birth");
  const auto mf = estimate_membership(column("procreation", words(vals)), spec, {});
  const auto& t = std::get<NominalTable>(mf.shape).table;
  CHECK(t.at("lays_eggs") == 1.0);
  CHECK(t.at("live_birth") == doctest::Approx(1.0 / 9.0).epsilon(1e-15));
  CHECK(t.at("spores") == kDefaultEpsilon);
}

TEST_CASE("estimate_weight worked values") {
  const auto cont = DimensionSpec::continuous("x", "d", 0.0, 1.0);
  SUBCASE("constant dimension") {
    CHECK(estimate_weight(column("x", numbers({0.37, 0.37, 0.37})), cont, {0.0, 1.0}) == 1.0);
    const auto nom = DimensionSpec::nominal("s", "d", {"a", "b"});
    CHECK(estimate_weight(column("s", words({"a", "a", "a"})), nom, {}) == 1.0);
  }
  SUBCASE("half at 0, half at 1 clamps to w_min") {
    CHECK(estimate_weight(column("x", numbers({0, 0, 1, 1})), cont, {0.0, 1.0}) == kDefaultWeightMin);
  }
  SUBCASE("50/50 two-category split clamps to w_min") {
    const auto nom = DimensionSpec::nominal("colour", "colour", {"red", "blue"});
    CHECK(estimate_weight(column("colour", words({"red", "blue", "red", "blue"})), nom, {}) == kDefaultWeightMin);
  }
  SUBCASE("intermediate value") {
    // population std of {0.4, 0.6} is 0.1 -> 1 - 0.1/0.5
    CHECK(estimate_weight(column("x", numbers({0.4, 0.6})), cont, {0.0, 1.0}) == doctest::Approx(0.8).epsilon(1e-12));
  }
}

TEST_CASE("weights are non-increasing as spread grows") {
  const auto cont = DimensionSpec::continuous("x", "d", 0.0, 1.0);
  double previous = 2.0;
  for (int k = 0; k <= 20; ++k) {
    const double s = 0.025 * k;
    const auto w = estimate_weight(column("x", numbers({0.5 - s, 0.5, 0.5 + s})), cont, {0.0, 1.0});
    CHECK(w <= previous);
    previous = w;
  }
}

TEST_CASE("train: idealised scene gives exact prototypes and unit weights") {
  const auto data = scenegen::generate(scenegen::builtin_fixture("idealised"));
  const auto space = train(data);
  CHECK(validate_space(space).empty());
  REQUIRE(space.concepts.size() == 2);
  const auto& red = space.concept_at("Red Cube");
  const auto& green = space.concept_at("Green Ball");
  CHECK(std::get<double>(red.prototype.at("hue")) == 0.0);
  CHECK(std::get<std::string>(red.prototype.at("shape")) == "cube");
  CHECK(std::get<double>(green.prototype.at("hue")) == 120.0);
  CHECK(std::get<std::string>(green.prototype.at("shape")) == "sphere");
  for (const auto* c : {&red, &green}) {
    for (const auto& [dim, w] : c->weights) CHECK(w == 1.0);
  }
}

TEST_CASE("train: drill-riveter utilisation weights are 1, size weights below") {
  const auto space = train(scenegen::generate(scenegen::builtin_fixture("drill-riveter")));
  CHECK(validate_space(space).empty());
  for (const auto& [id, c] : space.concepts) {
    CHECK(c.weights.at("drill") == 1.0);
    CHECK(c.weights.at("rivet") == 1.0);
    CHECK(c.weights.at("length") < 1.0);
    CHECK(c.weights.at("width") < 1.0);
  }
}

TEST_CASE("train: learned memberships peak at 1 on training values") {
  const auto data = scenegen::generate(scenegen::builtin_fixture("four-artefacts"));
  const auto space = train(data);
  for (const auto& [id, c] : space.concepts) {
    for (const auto& [dim, mf] : c.memberships) {
      if (const auto* t = std::get_if<NominalTable>(&mf.shape)) {
        double best = 0.0;
        for (const auto& [cat, mu] : t->table) best = std::max(best, mu);
        CHECK(best == 1.0);
      }
    }
  }
}

TEST_CASE("train errors") {
  Dataset empty;
  empty.dimensions = {DimensionSpec::continuous("x", "d", 0.0, 1.0)};
  CHECK_THROWS_AS(train(empty), Error);

  Dataset thin = empty;
  thin.instances = column("x", numbers({0.1, 0.2}));
  thin.instances[1].label = "Lonely";
  try {
    train(thin);
    FAIL("expected insufficient data");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::insufficient_data);
    CHECK(std::string(e.what()).find("Lonely") != std::string::npos);
  }
}

TEST_CASE("train is permutation invariant and deterministic") {
  auto data = scenegen::generate(scenegen::builtin_fixture("drill-riveter"));
  const auto reference = serialize_space(train(data));
  CHECK(serialize_space(train(data)) == reference);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 5; ++i) {
    std::shuffle(data.instances.begin(), data.instances.end(), rng);
    CHECK(serialize_space(train(data)) == reference);
  }
}

TEST_CASE("dataset_from_csv reads labels, ids and quoted fields") {
  const Json schema = {{"dimensions",
                        {{{"id", "len"}, {"domain", "size"}, {"kind", "continuous"}, {"unit", "m"}, {"range", {0, 1}}},
                         {{"id", "shape"}, {"domain", "shape"}, {"kind", "nominal"}, {"categories", {"box", "odd, one"}}}}}};
  const std::string csv =
      "id,label,len,shape\n"
      "a,Box,0.2,box\n"
      "b,Box,0.3,\"odd, one\"\n";
  const auto data = dataset_from_csv(csv, schema);
  REQUIRE(data.instances.size() == 2);
  CHECK(data.instances[0].id == "a");
  CHECK(*data.instances[1].label == "Box");
  CHECK(std::get<double>(data.instances[1].values.at("len")) == 0.3);
  CHECK(std::get<std::string>(data.instances[1].values.at("shape")) == "odd, one");
  CHECK_THROWS_AS(dataset_from_csv("len,shape\n0.2,box\n", schema), Error);
}

TEST_CASE("dataset JSON round trip") {
  const auto data = scenegen::generate(scenegen::builtin_fixture("idealised"));
  CHECK(dataset_from_json(parse_json(dump_json(to_json(data)))) == data);
}
