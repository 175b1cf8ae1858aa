#include "muw/learning.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>

#include <fmt/format.h>
#include <fmt/ranges.h>

namespace muw {

namespace {

void require_instances(std::span<const Instance> instances, const DimensionSpec& spec) {
  if (instances.empty()) {
    throw Error(ErrorKind::insufficient_data,
                fmt::format("no instances to learn dimension '{}' from", spec.id), spec.id);
  }
}

const Value& value_of(const Instance& instance, const DimensionSpec& spec) {
  const auto it = instance.values.find(spec.id);
  if (it == instance.values.end()) {
    throw Error(ErrorKind::invalid_input,
                fmt::format("instance '{}' has no value for dimension '{}'", instance.id, spec.id), spec.id);
  }
  check_value(spec, it->second);
  return it->second;
}

// Sorted so that sums and therefore every learned parameter are independent of instance order.
std::vector<double> sorted_numbers(std::span<const Instance> instances, const DimensionSpec& spec) {
  std::vector<double> values;
  values.reserve(instances.size());
  for (const auto& instance : instances) values.push_back(std::get<double>(value_of(instance, spec)));
  std::sort(values.begin(), values.end());
  return values;
}

std::map<std::string, std::size_t> category_counts(std::span<const Instance> instances, const DimensionSpec& spec) {
  std::map<std::string, std::size_t> counts;
  for (const auto& instance : instances) ++counts[std::get<std::string>(value_of(instance, spec))];
  return counts;
}

double mean_of(const std::vector<double>& sorted) {
  if (sorted.front() == sorted.back()) return sorted.front();
  double sum = 0.0;
  for (const double v : sorted) sum += v;
  return sum / static_cast<double>(sorted.size());
}

// Divides by (n - ddof); zero for constant samples and for samples too small for the estimator.
double std_dev(const std::vector<double>& sorted, std::size_t ddof) {
  if (sorted.size() <= ddof || sorted.front() == sorted.back()) return 0.0;
  const double mean = mean_of(sorted);
  double acc = 0.0;
  for (const double v : sorted) acc += (v - mean) * (v - mean);
  return std::sqrt(acc / static_cast<double>(sorted.size() - ddof));
}

std::vector<double> standardized(const std::vector<double>& sorted_raw, const DimensionSpec& spec, Bounds bounds) {
  std::vector<double> out;
  out.reserve(sorted_raw.size());
  for (const double v : sorted_raw) out.push_back(standardize(v, spec, bounds));
  return out;
}

const std::string& mode_of(const std::map<std::string, std::size_t>& counts) {
  // std::map iterates in lexicographic order and max_element keeps the first maximum.
  return std::max_element(counts.begin(), counts.end(),
                          [](const auto& a, const auto& b) { return a.second < b.second; })
      ->first;
}

}  // namespace

Value learn_prototype(std::span<const Instance> instances, const DimensionSpec& spec) {
  require_instances(instances, spec);
  if (spec.is_continuous()) return mean_of(sorted_numbers(instances, spec));
  return mode_of(category_counts(instances, spec));
}

MembershipFunction estimate_membership(std::span<const Instance> instances, const DimensionSpec& spec,
                                       Bounds bounds, const TrainingConfig& config) {
  require_instances(instances, spec);
  MembershipFunction mf;
  mf.floor = config.epsilon;
  if (spec.is_continuous()) {
    const auto raw = sorted_numbers(instances, spec);
    const auto scaled = standardized(raw, spec, bounds);
    const double width = std::max(std_dev(scaled, 1), config.width_min);
    mf.shape = GaussianMembership{standardize(mean_of(raw), spec, bounds), width};
    return mf;
  }
  const auto counts = category_counts(instances, spec);
  const double mode_count = static_cast<double>(counts.at(mode_of(counts)));
  NominalTable table;
  for (const auto& category : spec.categories) {
    const auto it = counts.find(category);
    const double ratio = it == counts.end() ? 0.0 : static_cast<double>(it->second) / mode_count;
    table.table[category] = std::max(ratio, config.epsilon);
  }
  mf.shape = std::move(table);
  return mf;
}

double estimate_weight(std::span<const Instance> instances, const DimensionSpec& spec, Bounds bounds,
                       const TrainingConfig& config) {
  require_instances(instances, spec);
  double raw_weight = 1.0;
  if (spec.is_continuous()) {
    const double sigma = std_dev(standardized(sorted_numbers(instances, spec), spec, bounds), 0);
    raw_weight = 1.0 - sigma / kMaxStandardizedSpread;
  } else {
    const auto counts = category_counts(instances, spec);
    if (spec.categories.size() > 1 && counts.size() > 1) {
      const double total = static_cast<double>(instances.size());
      double entropy = 0.0;
      for (const auto& [category, count] : counts) {
        const double p = static_cast<double>(count) / total;
        entropy -= p * std::log(p);
      }
      raw_weight = 1.0 - entropy / std::log(static_cast<double>(spec.categories.size()));
    }
  }
  return std::clamp(raw_weight, config.w_min, 1.0);
}

Bounds standardization_bounds(std::span<const Instance> instances, const DimensionSpec& spec) {
  const auto values = sorted_numbers(instances, spec);
  if (values.empty() || values.front() == values.back()) {
    if (spec.range.min < spec.range.max) return spec.range;
    const double centre = values.empty() ? 0.0 : values.front();
    return {centre - 0.5, centre + 0.5};
  }
  return {values.front(), values.back()};
}

namespace {

void check_dataset(const Dataset& dataset) {
  if (dataset.dimensions.empty()) throw Error(ErrorKind::insufficient_data, "dataset declares no dimensions");
  if (dataset.instances.empty()) throw Error(ErrorKind::insufficient_data, "dataset has no instances");
  std::set<std::string> ids;
  for (const auto& spec : dataset.dimensions) {
    if (!ids.insert(spec.id).second) {
      throw Error(ErrorKind::invalid_input, fmt::format("dimension '{}' declared twice", spec.id), spec.id);
    }
    if (spec.is_continuous() && !(spec.range.min < spec.range.max)) {
      throw Error(ErrorKind::invalid_input, fmt::format("dimension '{}' has an empty range", spec.id), spec.id);
    }
    if (!spec.is_continuous() && spec.categories.empty()) {
      throw Error(ErrorKind::invalid_input, fmt::format("dimension '{}' has no categories", spec.id), spec.id);
    }
  }
  for (const auto& instance : dataset.instances) {
    if (!instance.label || instance.label->empty()) {
      throw Error(ErrorKind::invalid_input, fmt::format("instance '{}' has no label", instance.id));
    }
    for (const auto& [dim, value] : instance.values) {
      if (ids.count(dim) == 0) {
        throw Error(ErrorKind::invalid_input,
                    fmt::format("instance '{}' has unknown dimension '{}'", instance.id, dim), dim);
      }
    }
    for (const auto& spec : dataset.dimensions) value_of(instance, spec);
  }
}

}  // namespace

ConceptualSpace train(const Dataset& dataset, const TrainingConfig& config) {
  check_dataset(dataset);

  std::map<std::string, std::vector<Instance>> by_label;
  for (const auto& instance : dataset.instances) by_label[*instance.label].push_back(instance);
  std::vector<std::string> thin;
  for (const auto& [label, members] : by_label) {
    if (members.size() < config.min_support) thin.push_back(fmt::format("'{}' ({})", label, members.size()));
  }
  if (!thin.empty()) {
    throw Error(ErrorKind::insufficient_data,
                fmt::format("label(s) {} have fewer instances than the minimum support {}", fmt::join(thin, ", "),
                            config.min_support));
  }

  ConceptualSpace space;
  space.dimensions = dataset.dimensions;
  space.params = ModelParams{config.epsilon, config.w_min, config.delta};
  for (const auto& spec : dataset.dimensions) {
    if (spec.is_continuous()) space.standardization[spec.id] = standardization_bounds(dataset.instances, spec);
  }

  for (const auto& [label, members] : by_label) {
    Concept c;
    c.id = label;
    c.support = members.size();
    for (const auto& spec : dataset.dimensions) {
      const Bounds bounds = spec.is_continuous() ? space.standardization.at(spec.id) : Bounds{};
      c.prototype.emplace(spec.id, learn_prototype(members, spec));
      c.memberships.emplace(spec.id, estimate_membership(members, spec, bounds, config));
      c.weights.emplace(spec.id, estimate_weight(members, spec, bounds, config));
    }
    space.concepts.emplace(label, std::move(c));
  }
  return space;
}

Json to_json(const Dataset& dataset) {
  Json dims = Json::array();
  for (const auto& spec : dataset.dimensions) dims.push_back(to_json(spec));
  Json instances = Json::array();
  for (const auto& instance : dataset.instances) instances.push_back(to_json(instance, dataset.dimensions));
  Json node = {{"dimensions", std::move(dims)}, {"instances", std::move(instances)}};
  if (dataset.header) node["header"] = *dataset.header;
  return node;
}

Dataset dataset_from_json(const Json& node) {
  using namespace json_detail;
  require_object(node, "");
  Dataset dataset;
  dataset.dimensions = dimensions_from_json(require(node, "dimensions", ""), "dimensions");
  const auto& instances = require_array(require(node, "instances", ""), "instances");
  dataset.instances.reserve(instances.size());
  for (std::size_t i = 0; i < instances.size(); ++i) {
    dataset.instances.push_back(instance_from_json(instances[i], dataset.dimensions, fmt::format("instances[{}]", i)));
  }
  if (node.contains("header")) dataset.header = node["header"];
  return dataset;
}

Dataset load_dataset(const std::filesystem::path& path) { return dataset_from_json(read_json_file(path)); }

namespace {

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        field.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"': quoted = true; any = true; break;
      case ',': row.push_back(std::move(field)); field.clear(); any = true; break;
      case '\r': break;
      case '\n':
        if (any || !field.empty()) {
          row.push_back(std::move(field));
          rows.push_back(std::move(row));
        }
        row.clear(); field.clear(); any = false;
        break;
      default: field.push_back(c); any = true;
    }
  }
  if (quoted) throw Error(ErrorKind::schema, "unterminated quoted CSV field");
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

Dataset dataset_from_csv(std::string_view csv, const Json& schema) {
  Dataset dataset;
  dataset.dimensions = dimensions_from_json(json_detail::require(schema, "dimensions", ""), "dimensions");
  const auto rows = parse_csv(csv);
  if (rows.empty()) throw Error(ErrorKind::insufficient_data, "CSV has no header row");

  const auto& header = rows.front();
  std::vector<const DimensionSpec*> column_specs(header.size(), nullptr);
  std::optional<std::size_t> label_col;
  std::optional<std::size_t> id_col;
  for (std::size_t col = 0; col < header.size(); ++col) {
    if (header[col] == "label") {
      label_col = col;
    } else if (header[col] == "id") {
      id_col = col;
    } else {
      const auto it = std::find_if(dataset.dimensions.begin(), dataset.dimensions.end(),
                                   [&](const DimensionSpec& s) { return s.id == header[col]; });
      if (it == dataset.dimensions.end()) {
        throw Error(ErrorKind::schema, fmt::format("CSV column '{}' is not a declared dimension", header[col]),
                    header[col]);
      }
      column_specs[col] = &*it;
    }
  }
  if (!label_col) throw Error(ErrorKind::schema, "CSV has no 'label' column", "label");

  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const auto where = fmt::format("row {}", r + 1);
    if (row.size() != header.size()) {
      throw Error(ErrorKind::schema, fmt::format("{} has {} fields, expected {}", where, row.size(), header.size()));
    }
    Instance instance;
    instance.id = id_col ? row[*id_col] : fmt::format("row-{}", r);
    if (!row[*label_col].empty()) instance.label = row[*label_col];
    for (std::size_t col = 0; col < row.size(); ++col) {
      const auto* spec = column_specs[col];
      if (spec == nullptr || row[col].empty()) continue;
      const auto field = fmt::format("{}.{}", where, spec->id);
      if (spec->is_continuous()) {
        double number = 0.0;
        const auto& cell = row[col];
        const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), number);
        if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
          throw Error(ErrorKind::schema, fmt::format("'{}' is not a number", cell), field);
        }
        instance.values.emplace(spec->id, value_from_json(number, *spec, field));
      } else {
        instance.values.emplace(spec->id, value_from_json(row[col], *spec, field));
      }
    }
    dataset.instances.push_back(std::move(instance));
  }
  return dataset;
}

}  // namespace muw
