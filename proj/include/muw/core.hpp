#pragma once

// Conceptual-space data model: quality dimensions, concepts, instances and
// the trained space. All types are plain values; a space is never mutated
// after construction, so it may be shared read-only across threads.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "muw/error.hpp"

namespace muw {

inline constexpr double kDefaultEpsilon = 1e-6;
inline constexpr double kDefaultWeightMin = 0.05;
inline constexpr double kDefaultDelta = 0.1;
inline constexpr double kDefaultWidthMin = 0.01;
inline constexpr std::string_view kSchemaVersion = "1";

enum class DimensionKind { continuous, nominal, binary };

std::string_view to_string(DimensionKind kind) noexcept;
DimensionKind dimension_kind_from_string(std::string_view text);

struct Bounds {
  double min = 0.0;
  double max = 1.0;

  bool operator==(const Bounds&) const = default;
};

struct DimensionSpec {
  std::string id;
  std::string domain;
  DimensionKind kind = DimensionKind::continuous;
  std::string unit;
  Bounds range;
  std::vector<std::string> categories;

  [[nodiscard]] bool is_continuous() const noexcept { return kind == DimensionKind::continuous; }

  static DimensionSpec continuous(std::string id, std::string domain, double min, double max,
                                  std::string unit = {});
  static DimensionSpec nominal(std::string id, std::string domain, std::vector<std::string> categories);
  /// Nominal dimension over {"0", "1"}; used for utilisation properties.
  static DimensionSpec binary(std::string id, std::string domain);

  bool operator==(const DimensionSpec&) const = default;
};

/// A property value: a raw scalar for continuous dimensions, a category label otherwise.
/// Binary dimensions use the labels "0" and "1".
using Value = std::variant<double, std::string>;

std::string format_value(const Value& value);

/// exp(-(x - center)^2 / (2 width^2)) over standardized x.
struct GaussianMembership {
  double center = 0.5;
  double width = 0.1;

  bool operator==(const GaussianMembership&) const = default;
};

struct NominalTable {
  std::map<std::string, double> table;

  bool operator==(const NominalTable&) const = default;
};

struct MembershipFunction {
  std::variant<GaussianMembership, NominalTable> shape;
  double floor = kDefaultEpsilon;

  [[nodiscard]] bool is_gaussian() const noexcept {
    return std::holds_alternative<GaussianMembership>(shape);
  }

  bool operator==(const MembershipFunction&) const = default;
};

struct Concept {
  std::string id;
  std::map<std::string, Value> prototype;
  std::map<std::string, MembershipFunction> memberships;
  std::map<std::string, double> weights;
  std::size_t support = 1;

  bool operator==(const Concept&) const = default;
};

struct Instance {
  std::string id;
  std::map<std::string, Value> values;
  std::optional<std::string> label;

  bool operator==(const Instance&) const = default;
};

/// Model-wide constants stored alongside the concepts.
struct ModelParams {
  double epsilon = kDefaultEpsilon;
  double w_min = kDefaultWeightMin;
  double delta = kDefaultDelta;

  bool operator==(const ModelParams&) const = default;
};

struct ConceptualSpace {
  std::vector<DimensionSpec> dimensions;
  std::map<std::string, Concept> concepts;
  /// Global min-max bounds per continuous dimension.
  std::map<std::string, Bounds> standardization;
  std::string schema_version{kSchemaVersion};
  ModelParams params;

  [[nodiscard]] const DimensionSpec* find_dimension(std::string_view id) const noexcept;
  /// Throws invalid_input if the dimension is unknown.
  [[nodiscard]] const DimensionSpec& dimension(std::string_view id) const;
  /// Throws invalid_model if the dimension has no recorded bounds.
  [[nodiscard]] Bounds bounds(std::string_view id) const;
  /// Throws invalid_model if the concept is unknown.
  [[nodiscard]] const Concept& concept_at(std::string_view id) const;

  bool operator==(const ConceptualSpace&) const = default;
};

/// Min-max scaling into [0, 1], clamped.
double standardize(double value, const DimensionSpec& spec, Bounds bounds);

struct Violation {
  std::string concept_id;  ///< empty for space-level or dimension-level rules
  std::string dimension;   ///< empty for concept-level rules
  std::string rule;
  std::string message;
};

/// Empty iff every structural invariant of the space holds.
std::vector<Violation> validate_space(const ConceptualSpace& space);

/// Checks that the value matches the dimension's kind and domain; throws invalid_input otherwise.
void check_value(const DimensionSpec& spec, const Value& value);

}  // namespace muw
