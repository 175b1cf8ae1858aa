#include "muw/core.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

namespace muw {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_input: return "invalid_input";
    case ErrorKind::insufficient_data: return "insufficient_data";
    case ErrorKind::invalid_model: return "invalid_model";
    case ErrorKind::not_found: return "not_found";
    case ErrorKind::no_overlap: return "no_overlap";
    case ErrorKind::schema: return "schema";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message, std::string field)
    : std::runtime_error(message), kind_(kind), field_(std::move(field)) {}

std::string_view to_string(DimensionKind kind) noexcept {
  switch (kind) {
    case DimensionKind::continuous: return "continuous";
    case DimensionKind::nominal: return "nominal";
    case DimensionKind::binary: return "binary";
  }
  return "continuous";
}

DimensionKind dimension_kind_from_string(std::string_view text) {
  if (text == "continuous") return DimensionKind::continuous;
  if (text == "nominal") return DimensionKind::nominal;
  if (text == "binary") return DimensionKind::binary;
  throw Error(ErrorKind::schema, fmt::format("unknown dimension kind '{}'", text));
}

DimensionSpec DimensionSpec::continuous(std::string id, std::string domain, double min, double max,
                                        std::string unit) {
  return DimensionSpec{std::move(id), std::move(domain), DimensionKind::continuous, std::move(unit),
                       Bounds{min, max}, {}};
}

DimensionSpec DimensionSpec::nominal(std::string id, std::string domain,
                                     std::vector<std::string> categories) {
  return DimensionSpec{std::move(id), std::move(domain), DimensionKind::nominal, {}, Bounds{},
                       std::move(categories)};
}

DimensionSpec DimensionSpec::binary(std::string id, std::string domain) {
  return DimensionSpec{std::move(id), std::move(domain), DimensionKind::binary, {}, Bounds{}, {"0", "1"}};
}

std::string format_value(const Value& value) {
  if (const auto* number = std::get_if<double>(&value)) {
    return fmt::format("{}", *number);
  }
  return std::get<std::string>(value);
}

const DimensionSpec* ConceptualSpace::find_dimension(std::string_view id) const noexcept {
  const auto it = std::find_if(dimensions.begin(), dimensions.end(),
                               [&](const DimensionSpec& spec) { return spec.id == id; });
  return it == dimensions.end() ? nullptr : &*it;
}

const DimensionSpec& ConceptualSpace::dimension(std::string_view id) const {
  if (const auto* spec = find_dimension(id)) return *spec;
  throw Error(ErrorKind::invalid_input, fmt::format("unknown dimension '{}'", id), std::string(id));
}

Bounds ConceptualSpace::bounds(std::string_view id) const {
  const auto it = standardization.find(std::string(id));
  if (it == standardization.end()) {
    throw Error(ErrorKind::invalid_model, fmt::format("no standardization bounds for dimension '{}'", id));
  }
  return it->second;
}

const Concept& ConceptualSpace::concept_at(std::string_view id) const {
  const auto it = concepts.find(std::string(id));
  if (it == concepts.end()) {
    throw Error(ErrorKind::invalid_model, fmt::format("unknown concept '{}'", id));
  }
  return it->second;
}

double standardize(double value, const DimensionSpec& spec, Bounds bounds) {
  if (!spec.is_continuous()) {
    throw Error(ErrorKind::invalid_input, fmt::format("dimension '{}' is not continuous", spec.id), spec.id);
  }
  if (!std::isfinite(value)) {
    throw Error(ErrorKind::invalid_input, fmt::format("non-finite value for dimension '{}'", spec.id), spec.id);
  }
  if (!(bounds.min < bounds.max)) {
    throw Error(ErrorKind::invalid_input,
                fmt::format("degenerate bounds [{}, {}] for dimension '{}'", bounds.min, bounds.max, spec.id),
                spec.id);
  }
  const double scaled = (value - bounds.min) / (bounds.max - bounds.min);
  return std::clamp(scaled, 0.0, 1.0);
}

void check_value(const DimensionSpec& spec, const Value& value) {
  if (spec.is_continuous()) {
    const auto* number = std::get_if<double>(&value);
    if (number == nullptr) {
      throw Error(ErrorKind::invalid_input, fmt::format("dimension '{}' expects a number", spec.id), spec.id);
    }
    if (!std::isfinite(*number)) {
      throw Error(ErrorKind::invalid_input, fmt::format("non-finite value for dimension '{}'", spec.id), spec.id);
    }
    return;
  }
  const auto* label = std::get_if<std::string>(&value);
  if (label == nullptr) {
    throw Error(ErrorKind::invalid_input, fmt::format("dimension '{}' expects a category", spec.id), spec.id);
  }
  if (std::find(spec.categories.begin(), spec.categories.end(), *label) == spec.categories.end()) {
    throw Error(ErrorKind::invalid_input,
                fmt::format("'{}' is not a category of dimension '{}'", *label, spec.id), spec.id);
  }
}

namespace {

class ViolationSink {
 public:
  void add(std::string concept_id, std::string dimension, std::string rule, std::string message) {
    items_.push_back({std::move(concept_id), std::move(dimension), std::move(rule), std::move(message)});
  }
  std::vector<Violation> take() { return std::move(items_); }

 private:
  std::vector<Violation> items_;
};

void check_dimensions(const ConceptualSpace& space, ViolationSink& sink) {
  std::set<std::string> seen;
  for (const auto& spec : space.dimensions) {
    if (spec.id.empty()) sink.add({}, {}, "dimension id empty", "a dimension has an empty id");
    if (!seen.insert(spec.id).second) {
      sink.add({}, spec.id, "dimension id unique", fmt::format("dimension '{}' declared twice", spec.id));
    }
    switch (spec.kind) {
      case DimensionKind::continuous:
        if (!(spec.range.min < spec.range.max)) {
          sink.add({}, spec.id, "range min < max",
                   fmt::format("range [{}, {}] is not increasing", spec.range.min, spec.range.max));
        }
        break;
      case DimensionKind::nominal: {
        const std::set<std::string> unique(spec.categories.begin(), spec.categories.end());
        if (spec.categories.empty()) sink.add({}, spec.id, "categories non-empty", "no categories");
        if (unique.size() != spec.categories.size()) {
          sink.add({}, spec.id, "categories unique", "duplicate categories");
        }
        break;
      }
      case DimensionKind::binary: {
        const std::set<std::string> unique(spec.categories.begin(), spec.categories.end());
        if (spec.categories.size() != 2 || unique != std::set<std::string>{"0", "1"}) {
          sink.add({}, spec.id, "binary categories {0,1}", "binary dimension must have categories exactly {0, 1}");
        }
        break;
      }
    }
  }
}

void check_membership(const ConceptualSpace& space, const Concept& c, const DimensionSpec& spec,
                      const MembershipFunction& mf, ViolationSink& sink) {
  if (!(mf.floor > 0.0 && mf.floor < 1.0)) {
    sink.add(c.id, spec.id, "membership floor in (0,1)", fmt::format("floor {} out of range", mf.floor));
  }
  if (const auto* g = std::get_if<GaussianMembership>(&mf.shape)) {
    if (!spec.is_continuous()) {
      sink.add(c.id, spec.id, "membership kind matches dimension", "gaussian membership on a nominal dimension");
    }
    if (!(g->width > 0.0) || !std::isfinite(g->width)) {
      sink.add(c.id, spec.id, "width > 0", fmt::format("width {} is not positive", g->width));
    }
    if (!std::isfinite(g->center)) sink.add(c.id, spec.id, "center finite", "non-finite center");
    return;
  }
  const auto& table = std::get<NominalTable>(mf.shape).table;
  if (spec.is_continuous()) {
    sink.add(c.id, spec.id, "membership kind matches dimension", "nominal table on a continuous dimension");
    return;
  }
  for (const auto& [category, mu] : table) {
    if (std::find(spec.categories.begin(), spec.categories.end(), category) == spec.categories.end()) {
      sink.add(c.id, spec.id, "table keys are categories", fmt::format("'{}' is not a category", category));
    }
    if (!(mu >= mf.floor && mu <= 1.0)) {
      sink.add(c.id, spec.id, "table values in [floor,1]", fmt::format("mu('{}') = {} out of range", category, mu));
    }
  }
  const auto proto = c.prototype.find(spec.id);
  if (proto != c.prototype.end()) {
    if (const auto* mode = std::get_if<std::string>(&proto->second)) {
      const auto it = table.find(*mode);
      if (it == table.end() || it->second != 1.0) {
        sink.add(c.id, spec.id, "table contains mode with value 1",
                 fmt::format("mode '{}' does not map to 1", *mode));
      }
    }
  }
  (void)space;
}

void check_concept(const ConceptualSpace& space, const std::string& key, const Concept& c,
                   ViolationSink& sink) {
  if (c.id != key) {
    sink.add(key, {}, "concept id matches key", fmt::format("concept stored under '{}' has id '{}'", key, c.id));
  }
  if (c.support < 1) sink.add(key, {}, "support >= 1", "concept has no supporting instances");

  std::set<std::string> keys;
  for (const auto& [dim, value] : c.prototype) keys.insert(dim);
  for (const auto& [dim, value] : c.memberships) keys.insert(dim);
  for (const auto& [dim, value] : c.weights) keys.insert(dim);

  for (const auto& dim : keys) {
    const bool in_proto = c.prototype.count(dim) > 0;
    const bool in_mem = c.memberships.count(dim) > 0;
    const bool in_weight = c.weights.count(dim) > 0;
    if (!in_proto) sink.add(key, dim, "key sets identical", fmt::format("prototype missing key '{}'", dim));
    if (!in_mem) sink.add(key, dim, "key sets identical", fmt::format("memberships missing key '{}'", dim));
    if (!in_weight) sink.add(key, dim, "key sets identical", fmt::format("weights missing key '{}'", dim));

    const DimensionSpec* spec = space.find_dimension(dim);
    if (spec == nullptr) {
      sink.add(key, dim, "concept keys within dimensions", fmt::format("unknown dimension '{}'", dim));
      continue;
    }
    if (in_weight) {
      const double w = c.weights.at(dim);
      if (!(w >= space.params.w_min && w <= 1.0)) {
        sink.add(key, dim, "weight out of [w_min,1]",
                 fmt::format("weight {} outside [{}, 1]", w, space.params.w_min));
      }
    }
    if (in_proto) {
      try {
        check_value(*spec, c.prototype.at(dim));
      } catch (const Error& e) {
        sink.add(key, dim, "prototype value type-valid", e.what());
      }
    }
    if (in_mem) check_membership(space, c, *spec, c.memberships.at(dim), sink);
  }
}

}  // namespace

std::vector<Violation> validate_space(const ConceptualSpace& space) {
  ViolationSink sink;
  if (space.schema_version != kSchemaVersion) {
    sink.add({}, {}, "schema version", fmt::format("unsupported schema version '{}'", space.schema_version));
  }
  if (space.concepts.empty()) sink.add({}, {}, "at least one concept", "space has no concepts");
  if (!(space.params.epsilon > 0.0 && space.params.epsilon < 1.0)) {
    sink.add({}, {}, "epsilon in (0,1)", fmt::format("epsilon {} out of range", space.params.epsilon));
  }
  if (!(space.params.w_min > 0.0 && space.params.w_min <= 1.0)) {
    sink.add({}, {}, "w_min in (0,1]", fmt::format("w_min {} out of range", space.params.w_min));
  }
  if (!(space.params.delta >= 0.0 && space.params.delta <= 1.0)) {
    sink.add({}, {}, "delta in [0,1]", fmt::format("delta {} out of range", space.params.delta));
  }
  check_dimensions(space, sink);

  for (const auto& spec : space.dimensions) {
    if (!spec.is_continuous()) continue;
    const auto it = space.standardization.find(spec.id);
    if (it == space.standardization.end()) {
      sink.add({}, spec.id, "standardization covers continuous dimensions", "no bounds recorded");
    } else if (!(it->second.min < it->second.max)) {
      sink.add({}, spec.id, "standardization min < max", "degenerate bounds");
    }
  }
  for (const auto& [key, c] : space.concepts) check_concept(space, key, c, sink);
  return sink.take();
}

}  // namespace muw
