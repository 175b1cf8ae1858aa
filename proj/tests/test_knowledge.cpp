#include "doctest.h"

#include <cmath>
#include <numeric>
#include <random>

#include "muw/knowledge.hpp"
#include "support.hpp"

using namespace muw;
using namespace muw::knowledge;

namespace {

const KnowledgeFixture& kb() {
  static const KnowledgeFixture fixture = load_fixture(testing::source_path("data/kb"));
  return fixture;
}

std::vector<std::pair<std::string, double>> entries(std::initializer_list<std::pair<std::string, double>> xs) {
  return {xs.begin(), xs.end()};
}

}  // namespace

TEST_CASE("normalize_label") {
  CHECK(normalize_label("  Fork Lift ") == "fork_lift");
  CHECK(normalize_label("DRILL") == "drill");
}

TEST_CASE("lemma candidates undo inflection") {
  CHECK(extract_verb("drilling holes in things", kb()) == "drill");
  CHECK(extract_verb("carrying heavy loads", kb()) == "carry");
  CHECK(extract_verb("making holes", kb()) == "make");
  CHECK(extract_verb("planning warehouse logistics", kb()) == "plan");
  CHECK(extract_verb("drill a hole in something", kb()) == "drill");
  CHECK(extract_verb("lifted boxes", kb()) == "lift");
  CHECK(extract_verb("carries crates", kb()) == "carry");
  CHECK_FALSE(extract_verb("warehouse", kb()).has_value());
}

TEST_CASE("select_synset") {
  CHECK(select_synset("hammer", kb()) == "hammer.n.02");
  CHECK(select_synset("drill", kb()) == "drill.n.01");
  try {
    select_synset("happiness", kb());
    FAIL("expected not found");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::not_found);
  }
}

TEST_CASE("select_synset breaks ties on the smaller id") {
  KnowledgeFixture f;
  f.wordnet["widget"] = {{"widget.n.02", "n", "noun.artifact", 4, {"widget"}},
                         {"widget.n.01", "n", "noun.artifact", 4, {"widget"}}};
  CHECK(select_synset("widget", f) == "widget.n.01");
}

TEST_CASE("mine_usedfor: wordnet edges first") {
  const auto lemmas = synset_lemmas("drill.n.01", kb());
  const auto mined = mine_usedfor(lemmas, kb());
  CHECK(mined.provenance == Provenance::wordnet_edge);
  CHECK(mined.verbs == std::vector<std::string>{"drill", "make"});
}

TEST_CASE("mine_usedfor: crowd fallback drops weak edges") {
  const std::vector<std::string> lemmas{"forklift"};
  const auto mined = mine_usedfor(lemmas, kb());
  CHECK(mined.provenance == Provenance::crowd_edge);
  CHECK(mined.verbs == std::vector<std::string>{"carry", "lift", "plan"});
  for (const auto& [edge, verb] : mined.sources) CHECK(edge.weight > 1.0);
}

TEST_CASE("mine_usedfor: weight exactly 1.0 is noise") {
  KnowledgeFixture f = kb();
  f.conceptnet_edges = {{"thing", "UsedFor", "lifting", 1.0, EdgeSource::crowd}};
  const std::vector<std::string> lemmas{"thing"};
  const auto mined = mine_usedfor(lemmas, f);
  CHECK(mined.verbs.empty());
  CHECK(mined.provenance == Provenance::none);
}

TEST_CASE("stem_fallback") {
  CHECK(stem_fallback("riveter", kb()) == "rivet");
  CHECK(stem_fallback("hammer", kb()) == "hammer");
  CHECK(stem_fallback("drill", kb()) == "drill");
  CHECK_FALSE(stem_fallback("beauty", kb()).has_value());
  CHECK_FALSE(stem_fallback("gizmo", kb()).has_value());
}

TEST_CASE("filter_physical") {
  const std::vector<std::string> verbs{"drill", "think", "carry", "make", "unknown"};
  CHECK(filter_physical(verbs, kb()) == std::vector<std::string>{"drill", "carry"});
  CHECK(filter_physical(std::vector<std::string>{}, kb()).empty());
  PipelineConfig wider;
  wider.physical_lexnames.push_back("verb.creation");
  CHECK(filter_physical(verbs, kb(), wider) == std::vector<std::string>{"drill", "carry", "make"});
}

TEST_CASE("softmax worked values") {
  const auto one = softmax_grounding(entries({{"drill", 3.0}}));
  CHECK(one.at("drill") == 1.0);
  const auto pair = softmax_grounding(entries({{"drill", 16.0}, {"make", 1.0}}));
  CHECK(pair.at("drill") == doctest::Approx(0.9999997).epsilon(5e-7));
  CHECK(pair.at("make") == doctest::Approx(3.059e-7).epsilon(1e-3));
  CHECK(pair.at("drill") == doctest::Approx(1.0 / (1.0 + std::exp(-15.0))).epsilon(1e-15));
  const auto even = softmax_grounding(entries({{"a", 2.0}, {"b", 2.0}}));
  CHECK(even.at("a") == 0.5);
  CHECK(even.at("b") == 0.5);
  CHECK_THROWS_AS(softmax_grounding(entries({})), Error);
  CHECK_THROWS_AS(softmax_grounding(entries({{"a", 1.0}, {"a", 2.0}})), Error);
}

TEST_CASE("softmax properties") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int i = 0; i < 300; ++i) {
    std::vector<std::pair<std::string, double>> xs;
    const int n = 1 + static_cast<int>(rng() % 6);
    for (int k = 0; k < n; ++k) xs.emplace_back("k" + std::to_string(k), u(rng));
    const auto mu = softmax_grounding(xs);
    double sum = 0.0;
    for (const auto& [k, v] : mu) {
      CHECK(v >= 0.0);
      sum += v;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-9);
    auto shifted = xs;
    for (auto& [k, v] : shifted) v += 7.5;
    const auto mu2 = softmax_grounding(shifted);
    for (const auto& [k, v] : mu) CHECK(mu2.at(k) == doctest::Approx(v).epsilon(1e-9));
  }
}

TEST_CASE("group_by_verb sums member weights") {
  const auto lemmas = synset_lemmas("drill.n.01", kb());
  const auto mined = mine_usedfor(lemmas, kb());
  const auto groups = group_by_verb(mined.sources);
  REQUIRE(groups.size() == 2);
  CHECK(groups[0] == std::pair<std::string, double>{"drill", 16.0});
  CHECK(groups[1] == std::pair<std::string, double>{"make", 1.0});
}

TEST_CASE("ground_utilisation over the shipped fixture") {
  const auto& dims = default_utilisation_dims();
  SUBCASE("riveter") {
    const auto g = ground_utilisation("riveter", dims, kb());
    CHECK(g.provenance == Provenance::stem_fallback);
    CHECK(g.dims == std::map<std::string, int>{{"drill", 0}, {"hammer", 0}, {"lift", 0}, {"rivet", 1}});
  }
  SUBCASE("forklift") {
    const auto g = ground_utilisation("forklift", dims, kb());
    CHECK(g.provenance == Provenance::crowd_edge);
    CHECK(g.dims == std::map<std::string, int>{{"drill", 0}, {"hammer", 0}, {"lift", 1}, {"rivet", 0}});
    CHECK(g.verbs == std::vector<std::string>{"carry", "lift"});
    double sum = 0.0;
    for (const auto& [k, v] : g.groups) sum += v;
    CHECK(std::abs(sum - 1.0) <= 1e-9);
  }
  SUBCASE("drill") {
    const auto g = ground_utilisation("drill", dims, kb());
    CHECK(g.provenance == Provenance::wordnet_edge);
    CHECK(g.evidence.at("drill").mu == doctest::Approx(0.9999997).epsilon(5e-7));
  }
  SUBCASE("gizmo") {
    const auto g = ground_utilisation("gizmo", dims, kb());
    CHECK(g.provenance == Provenance::none);
    for (const auto& [d, v] : g.dims) CHECK(v == 0);
    CHECK(g.groups.empty());
  }
}

TEST_CASE("a stage with no physical verb falls through") {
  KnowledgeFixture f = kb();
  // only a cognition verb in the wordnet stage; crowd stage has lifting
  f.conceptnet_edges = {{"crane", "UsedFor", "planning", 5.0, EdgeSource::wordnet},
                        {"crane", "UsedFor", "lifting steel", 4.0, EdgeSource::crowd}};
  f.wordnet["crane"] = {{"crane.n.01", "n", "noun.artifact", 1, {"crane"}}};
  const auto g = ground_utilisation("crane", default_utilisation_dims(), f);
  CHECK(g.provenance == Provenance::crowd_edge);
  CHECK(g.dims.at("lift") == 1);
}

TEST_CASE("cognition verbs never ground a dimension") {
  KnowledgeFixture f = kb();
  f.utilisation_refs["think"] = {"think.v.01"};
  f.conceptnet_edges.push_back({"forklift", "UsedFor", "thinking hard", 9.0, EdgeSource::crowd});
  const std::vector<std::string> dims{"think", "lift"};
  const auto g = ground_utilisation("forklift", dims, f);
  CHECK(g.dims.at("think") == 0);
  CHECK(g.dims.at("lift") == 1);
}

TEST_CASE("fixture JSON round trip and merge") {
  const auto doc = to_json(kb());
  const auto back = fixture_from_json(doc);
  CHECK(to_json(back) == doc);
  KnowledgeFixture twice = kb();
  merge_fixture(twice, kb());
  CHECK(to_json(twice) == doc);
}

TEST_CASE("fixture JSON rejects bad edges") {
  Json doc = {{"conceptnet_edges", {{{"start", "a"}, {"relation", "UsedFor"}, {"end", "b"}, {"weight", 1.0}, {"source", "oracle"}}}}};
  try {
    fixture_from_json(doc);
    FAIL("expected schema error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::schema);
    CHECK(e.field() == "conceptnet_edges[0].source");
  }
}

TEST_CASE("grounding golden files") {
  for (const auto* label : {"drill", "hammer", "forklift", "riveter"}) {
    CAPTURE(label);
    const auto golden = read_json_file(testing::source_path(std::string("tests/golden/grounding_") + label + ".json"));
    CHECK(to_json(ground_utilisation(label, default_utilisation_dims(), kb())) == golden);
  }
}
