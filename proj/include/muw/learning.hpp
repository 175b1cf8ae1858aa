#pragma once

// Learns a conceptual space from labelled instances. Prototypes are centroids
// (continuous) or modes (nominal); memberships are estimated from observed
// frequencies; weights fall as within-concept variability rises.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "muw/core.hpp"
#include "muw/json_io.hpp"

namespace muw {

struct Dataset {
  std::vector<DimensionSpec> dimensions;
  std::vector<Instance> instances;
  /// Provenance written by the scene generator; carried through untouched.
  std::optional<Json> header;

  bool operator==(const Dataset&) const = default;
};

struct TrainingConfig {
  std::size_t min_support = 2;
  double width_min = kDefaultWidthMin;
  double w_min = kDefaultWeightMin;
  double epsilon = kDefaultEpsilon;
  /// Disputable-classification threshold stored in the model.
  double delta = kDefaultDelta;
};

/// Standard deviation of standardized values at which a continuous weight reaches zero.
inline constexpr double kMaxStandardizedSpread = 0.5;

/// Mean for continuous dimensions, mode for nominal ones (ties: smallest category).
Value learn_prototype(std::span<const Instance> instances, const DimensionSpec& spec);

MembershipFunction estimate_membership(std::span<const Instance> instances, const DimensionSpec& spec,
                                       Bounds bounds, const TrainingConfig& config = {});

/// Continuous: 1 - sigma / 0.5 on standardized values. Nominal: 1 - H / log(|categories|).
/// Clamped to [w_min, 1].
double estimate_weight(std::span<const Instance> instances, const DimensionSpec& spec, Bounds bounds,
                       const TrainingConfig& config = {});

ConceptualSpace train(const Dataset& dataset, const TrainingConfig& config = {});

/// Global min-max over the dataset. Falls back to the declared range when all values coincide.
Bounds standardization_bounds(std::span<const Instance> instances, const DimensionSpec& spec);

Json to_json(const Dataset& dataset);
Dataset dataset_from_json(const Json& node);
Dataset load_dataset(const std::filesystem::path& path);
/// CSV with a header row; `label` and optional `id` columns, one column per dimension.
/// The dimension schema comes from a sidecar document with a "dimensions" array.
Dataset dataset_from_csv(std::string_view csv, const Json& schema);

}  // namespace muw
