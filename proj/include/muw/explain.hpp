#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "muw/classifier.hpp"
#include "muw/core.hpp"
#include "muw/json_io.hpp"

namespace muw {

/// Domain whose dimensions describe what an artefact is used for.
inline constexpr std::string_view kUtilisationDomain = "utilisation";

struct RankedWeight {
  std::string dimension;
  double weight = 0.0;  ///< normalized to sum 1 over the concept
};

/// Normalized weights, descending; ties broken by dimension id.
std::vector<RankedWeight> feature_importance(const Concept& c);

struct Factor {
  std::string dimension;
  std::string concept_id;
  double weight = 0.0;  ///< raw learned weight
  double mu = 0.0;
  double share = 0.0;   ///< w~_i mu_i^2 / R^2
  std::size_t weight_rank = 0;  ///< 1-based position in feature_importance
};

struct ChartSeries {
  std::string name;
  std::vector<std::optional<double>> values;
};

struct Chart {
  std::vector<std::string> labels;
  std::vector<ChartSeries> series;
};

struct ExplanationReport {
  ClassificationResult result;
  std::string rationale;
  /// Winner's dimensions, descending by share.
  std::vector<Factor> top_factors;
  /// Contribution shares per concept (sum to 1 for concepts with R > 0).
  std::map<std::string, std::map<std::string, double>> shares;
  std::map<std::string, Instance> exemplars;
  Chart bar;     ///< typicality per concept
  Chart spider;  ///< raw membership per dimension, one series per concept
};

struct ExplainOptions {
  ClassifyOptions classify;
  std::size_t rationale_factors = 2;
  /// Memberships at or above this read as "similar".
  double similar_threshold = 0.5;
};

ExplanationReport explain(const Instance& instance, const ConceptualSpace& space, const ExplainOptions& options = {});

/// "drill" -> "drilling", "make" -> "making", "cut" -> "cutting".
std::string gerund(std::string_view verb);

struct GaussianOverride {
  std::optional<double> center;
  std::optional<double> width;
};

struct MembershipOverride {
  std::optional<GaussianOverride> gaussian;
  std::optional<std::map<std::string, double>> table;
};

struct WhatIfOverrides {
  /// concept -> dimension -> weight in (0, 1]
  std::map<std::string, std::map<std::string, double>> weights;
  std::map<std::string, std::map<std::string, MembershipOverride>> memberships;
  std::map<std::string, Value> values;

  [[nodiscard]] bool empty() const noexcept { return weights.empty() && memberships.empty() && values.empty(); }
};

struct WhatIfRequest {
  Instance instance;
  WhatIfOverrides overrides;
  std::optional<double> delta;
};

struct WhatIfResponse {
  ClassificationResult before;
  ClassificationResult after;
  bool changed = false;
  std::map<std::string, double> delta;  ///< after - before score per concept
};

/// Copy of the space with weight and membership overrides applied. Throws invalid_input naming the key.
ConceptualSpace apply_overrides(const ConceptualSpace& space, const WhatIfOverrides& overrides);
/// Copy of the instance with value overrides applied.
Instance apply_value_overrides(const Instance& instance, const WhatIfOverrides& overrides, const ConceptualSpace& space);

WhatIfResponse whatif(const WhatIfRequest& request, const ConceptualSpace& space);

Json to_json(const ExplanationReport& report, const ConceptualSpace& space);
Json to_json(const WhatIfResponse& response);
Json to_json(const std::vector<RankedWeight>& ranking);

WhatIfRequest whatif_request_from_json(const Json& node, const ConceptualSpace& space);

}  // namespace muw
