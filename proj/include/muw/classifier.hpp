#pragma once

// Typicality-based categorization. For an instance q and concept C with
// normalized weights w~_i = w_i / sum_k w_k (over the dimensions both supply):
//
//   representativeness component i = sqrt(w~_i) * mu_i(q)
//   typicality R_C(q)               = sqrt(sum_i w~_i * mu_i(q)^2)
//
// and the instance belongs to the concept with the highest typicality.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "muw/core.hpp"
#include "muw/json_io.hpp"

namespace muw {

/// Membership of a standardized scalar (gaussian) or a category label (table), floored.
/// Throws invalid_input when the value kind does not match the function kind.
double eval_membership(const MembershipFunction& mf, const Value& value);

/// Membership of a raw instance value on one dimension of a concept; standardizes continuous values.
double membership_of(const ConceptualSpace& space, const Concept& c, const DimensionSpec& spec, const Value& raw);

struct RepresentativenessVector {
  std::string concept_id;
  std::map<std::string, double> components;
  double norm = 0.0;
};

RepresentativenessVector representativeness(const Instance& instance, const Concept& c,
                                            const ConceptualSpace& space);

double typicality(const Instance& instance, const Concept& c, const ConceptualSpace& space);

struct ClassifyOptions {
  /// Falls back to the model's delta.
  std::optional<double> delta;
  /// Reject option: flag results whose best typicality is below this value. Off by default.
  std::optional<double> min_typicality;
};

struct DimensionScore {
  std::optional<double> mu;   ///< absent when the dimension was not scored
  double weight = 0.0;        ///< raw learned weight (0 if the concept lacks the dimension)
  double normalized_weight = 0.0;
  double contribution = 0.0;  ///< w~_i * mu_i^2; sums to R^2 over covered dimensions
  bool covered = false;       ///< both the instance and the concept supply the dimension
};

struct ClassificationResult {
  std::string winner;
  std::optional<std::string> runner_up;
  std::map<std::string, double> scores;
  bool disputable = false;
  double margin = 0.0;
  double delta = kDefaultDelta;
  bool rejected = false;
  std::map<std::string, std::map<std::string, DimensionScore>> per_dimension;
  std::vector<std::string> warnings;
};

ClassificationResult classify(const Instance& instance, const ConceptualSpace& space,
                              const ClassifyOptions& options = {});

/// Nearest prototype under standardized Euclidean distance; nominal mismatch counts as 1.
std::string voronoi_assign(const Instance& point, const ConceptualSpace& space);

Json to_json(const RepresentativenessVector& vector);
Json to_json(const ClassificationResult& result);

}  // namespace muw
