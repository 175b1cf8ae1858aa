#include "doctest.h"

#include <cmath>
#include <random>
#include <regex>

#include "muw/explain.hpp"
#include "muw/learning.hpp"
#include "muw/scenegen.hpp"
#include "support.hpp"

using namespace muw;
using testing::gaussian_concept;
using testing::point;
using testing::unit_space;

namespace {

const ConceptualSpace& drill_riveter() {
  static const ConceptualSpace space = train(scenegen::generate(scenegen::builtin_fixture("drill-riveter")));
  return space;
}

/// Instance at the Drill prototype with the given utilisation values.
Instance at_drill(const std::string& drill, const std::string& rivet) {
  Instance inst{"probe", drill_riveter().concept_at("Drill").prototype, std::nullopt};
  inst.values["drill"] = drill;
  inst.values["rivet"] = rivet;
  return inst;
}

}  // namespace

TEST_CASE("gerund") {
  CHECK(gerund("drill") == "drilling");
  CHECK(gerund("make") == "making");
  CHECK(gerund("cut") == "cutting");
  CHECK(gerund("rivet") == "riveting");
  CHECK(gerund("hammer") == "hammering");
  CHECK(gerund("lift") == "lifting");
  CHECK(gerund("carry") == "carrying");
  CHECK(gerund("tie") == "tying");
  CHECK(gerund("see") == "seeing");
}

TEST_CASE("feature_importance worked values") {
  Concept even = gaussian_concept("E", {"a", "b", "c", "d"}, {0, 0, 0, 0}, {1, 1, 1, 1}, {0.7, 0.7, 0.7, 0.7});
  const auto r = feature_importance(even);
  REQUIRE(r.size() == 4);
  for (const auto& e : r) CHECK(e.weight == 0.25);
  CHECK(r[0].dimension == "a");
  CHECK(r[3].dimension == "d");

  Concept two = gaussian_concept("T", {"a", "b"}, {0, 0}, {1, 1}, {0.05, 1.0});
  const auto r2 = feature_importance(two);
  CHECK(r2[0].dimension == "b");
  CHECK(r2[0].weight == doctest::Approx(0.952).epsilon(1e-3));
  CHECK(r2[1].weight == doctest::Approx(0.048).epsilon(1e-2));

  const auto drill = feature_importance(drill_riveter().concept_at("Drill"));
  CHECK(drill_riveter().dimension(drill[0].dimension).domain == kUtilisationDomain);
}

TEST_CASE("contribution shares worked values") {
  auto space = unit_space({"a", "b"});
  SUBCASE("uniform weights, all mu 1") {
    space.concepts["C"] = gaussian_concept("C", {"a", "b"}, {0.5, 0.5}, {0.1, 0.1}, {1, 1});
    const auto report = explain(point("q", {"a", "b"}, {0.5, 0.5}), space);
    CHECK(report.shares.at("C").at("a") == 0.5);
    CHECK(report.shares.at("C").at("b") == 0.5);
  }
  SUBCASE("w=(3,1), mu=(1,0.5)") {
    space.concepts["C"] = gaussian_concept("C", {"a", "b"}, {0.5, 0.5}, {0.1, 0.1}, {1.0, 1.0 / 3.0});
    const double b = 0.5 + 0.1 * std::sqrt(-2.0 * std::log(0.5));
    const auto report = explain(point("q", {"a", "b"}, {0.5, b}), space);
    CHECK(report.shares.at("C").at("a") == doctest::Approx(0.75 / 0.8125).epsilon(1e-12));
    CHECK(report.shares.at("C").at("b") == doctest::Approx(0.0625 / 0.8125).epsilon(1e-12));
    REQUIRE(report.top_factors.size() == 2);
    CHECK(report.top_factors[0].dimension == "a");
  }
}

TEST_CASE("shares sum to one and factors are sorted") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 200; ++i) {
    const auto space = testing::random_space(rng);
    const auto report = explain(testing::random_instance(rng, space), space);
    for (const auto& [id, shares] : report.shares) {
      double sum = 0.0;
      for (const auto& [d, s] : shares) sum += s;
      CHECK(std::abs(sum - 1.0) <= 1e-9);
    }
    for (std::size_t k = 1; k < report.top_factors.size(); ++k) {
      CHECK(report.top_factors[k - 1].share >= report.top_factors[k].share);
    }
  }
}

TEST_CASE("rationale names only top factors") {
  std::mt19937_64 rng(19);
  const std::regex named(R"( on (\S+) \(μ = )");
  for (int i = 0; i < 200; ++i) {
    const auto space = testing::random_space(rng);
    const auto report = explain(testing::random_instance(rng, space), space);
    std::size_t count = 0;
    for (auto it = std::sregex_iterator(report.rationale.begin(), report.rationale.end(), named);
         it != std::sregex_iterator(); ++it, ++count) {
      const auto dim = (*it)[1].str();
      REQUIRE(count < 2);
      CHECK(report.top_factors[count].dimension == dim);
    }
    CHECK(count == std::min<std::size_t>(2, report.top_factors.size()));
  }
}

TEST_CASE("drill rationale") {
  const auto report = explain(at_drill("1", "0"), drill_riveter());
  CHECK(report.result.winner == "Drill");
  CHECK(report.rationale.find("I believe this is a drill as it looks similar to other drills I've seen in the past, "
                              "and it is used for drilling.") != std::string::npos);
}

TEST_CASE("rationale when looks and use disagree") {
  const auto report = explain(at_drill("0", "1"), drill_riveter());
  CHECK(report.result.winner == "Riveter");
  CHECK(report.rationale.find("it is used for riveting.") != std::string::npos);
}

TEST_CASE("disputable result gets a hedge") {
  auto space = unit_space({"x"});
  space.concepts["A"] = gaussian_concept("A", {"x"}, {0.5}, {0.1}, {1});
  space.concepts["B"] = gaussian_concept("B", {"x"}, {0.5}, {0.1}, {1});
  const auto report = explain(point("q", {"x"}, {0.5}), space);
  CHECK(report.rationale.rfind("This classification is disputable: a leads b", 0) == 0);
}

TEST_CASE("chart data mirrors the result") {
  const auto& space = drill_riveter();
  const auto report = explain(at_drill("1", "0"), space);
  CHECK(report.bar.labels == std::vector<std::string>{"Drill", "Riveter"});
  REQUIRE(report.bar.series.size() == 1);
  CHECK(*report.bar.series[0].values[0] == report.result.scores.at("Drill"));
  std::vector<std::string> dims;
  for (const auto& d : space.dimensions) dims.push_back(d.id);
  CHECK(report.spider.labels == dims);
  CHECK(report.spider.series.size() == 2);
  CHECK(report.exemplars.at("Riveter").id == "prototype:Riveter");
}

TEST_CASE("whatif: empty overrides change nothing") {
  WhatIfRequest request{at_drill("1", "0"), {}, std::nullopt};
  const auto response = whatif(request, drill_riveter());
  CHECK_FALSE(response.changed);
  CHECK(response.before.scores == response.after.scores);
  for (const auto& [id, d] : response.delta) CHECK(d == 0.0);
}

TEST_CASE("whatif: silencing the utilisation weights flips Riveter to Drill") {
  WhatIfRequest request{at_drill("0", "1"), {}, std::nullopt};
  for (const auto* c : {"Drill", "Riveter"}) {
    for (const auto* d : {"drill", "rivet"}) request.overrides.weights[c][d] = kDefaultEpsilon;
  }
  const auto response = whatif(request, drill_riveter());
  CHECK(response.before.winner == "Riveter");
  CHECK(response.after.winner == "Drill");
  CHECK(response.changed);
}

TEST_CASE("whatif: flipping the use value flips the winner") {
  WhatIfRequest request{at_drill("1", "0"), {}, std::nullopt};
  request.overrides.values["drill"] = std::string("0");
  request.overrides.values["rivet"] = std::string("1");
  const auto response = whatif(request, drill_riveter());
  CHECK(response.before.winner == "Drill");
  CHECK(response.after.winner == "Riveter");
}

TEST_CASE("whatif: overrides equal to current parameters report no change") {
  const auto& space = drill_riveter();
  WhatIfRequest request{at_drill("0", "1"), {}, std::nullopt};
  for (const auto& [id, c] : space.concepts) request.overrides.weights[id] = c.weights;
  const auto& g = std::get<GaussianMembership>(space.concept_at("Drill").memberships.at("length").shape);
  request.overrides.memberships["Drill"]["length"].gaussian = GaussianOverride{g.center, g.width};
  const auto response = whatif(request, space);
  CHECK_FALSE(response.changed);
  CHECK(response.before.scores == response.after.scores);
}

TEST_CASE("whatif leaves the model untouched") {
  const auto& space = drill_riveter();
  const auto before = serialize_space(space);
  WhatIfRequest request{at_drill("1", "0"), {}, 0.3};
  request.overrides.weights["Drill"]["hue"] = 0.9;
  request.overrides.memberships["Riveter"]["shape"].table = std::map<std::string, double>{{"box", 1.0}};
  request.overrides.values["hue"] = 200.0;
  for (int i = 0; i < 5; ++i) whatif(request, space);
  CHECK(serialize_space(space) == before);
}

TEST_CASE("whatif rejects invalid overrides by key") {
  const auto& space = drill_riveter();
  const auto expect_field = [&](const WhatIfRequest& request, const std::string& field) {
    try {
      whatif(request, space);
      FAIL("expected invalid input");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::invalid_input);
      CHECK(e.field() == field);
    }
  };
  WhatIfRequest zero{at_drill("1", "0"), {}, std::nullopt};
  zero.overrides.weights["Drill"]["rivet"] = 0.0;
  expect_field(zero, "overrides.weights.Drill.rivet");

  WhatIfRequest ghost{at_drill("1", "0"), {}, std::nullopt};
  ghost.overrides.weights["Hammer"]["rivet"] = 0.5;
  expect_field(ghost, "overrides.weights.Hammer");

  WhatIfRequest width{at_drill("1", "0"), {}, std::nullopt};
  width.overrides.memberships["Drill"]["length"].gaussian = GaussianOverride{std::nullopt, -1.0};
  expect_field(width, "overrides.memberships.Drill.length.width");

  WhatIfRequest value{at_drill("1", "0"), {}, std::nullopt};
  value.overrides.values["shape"] = std::string("sphere");
  expect_field(value, "overrides.values.shape");
}

TEST_CASE("report JSON has the documented shape") {
  const auto doc = to_json(explain(at_drill("1", "0"), drill_riveter()), drill_riveter());
  for (const auto* key : {"result", "rationale", "top_factors", "shares", "exemplars", "chart_data"}) {
    CAPTURE(key);
    CHECK(doc.contains(key));
  }
  CHECK(doc["chart_data"]["bar"]["labels"] == Json::array({"Drill", "Riveter"}));
  CHECK(doc["top_factors"][0].contains("weight_rank"));
}
