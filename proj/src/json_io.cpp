#include "muw/json_io.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace muw {

namespace json_detail {

std::string join_path(const std::string& base, std::string_view key) {
  if (base.empty()) return std::string(key);
  return fmt::format("{}.{}", base, key);
}

const Json& require_object(const Json& node, const std::string& path) {
  if (!node.is_object()) {
    throw Error(ErrorKind::schema, fmt::format("'{}' must be an object", path.empty() ? "$" : path), path);
  }
  return node;
}

const Json& require_array(const Json& node, const std::string& path) {
  if (!node.is_array()) {
    throw Error(ErrorKind::schema, fmt::format("'{}' must be an array", path), path);
  }
  return node;
}

const Json& require(const Json& node, std::string_view key, const std::string& path) {
  require_object(node, path);
  const auto it = node.find(key);
  const auto field = join_path(path, key);
  if (it == node.end()) throw Error(ErrorKind::schema, fmt::format("missing field '{}'", field), field);
  return *it;
}

double require_number(const Json& node, const std::string& path) {
  if (!node.is_number()) throw Error(ErrorKind::schema, fmt::format("'{}' must be a number", path), path);
  const double value = node.get<double>();
  if (!std::isfinite(value)) throw Error(ErrorKind::schema, fmt::format("'{}' must be finite", path), path);
  return value;
}

std::string require_string(const Json& node, const std::string& path) {
  if (!node.is_string()) throw Error(ErrorKind::schema, fmt::format("'{}' must be a string", path), path);
  return node.get<std::string>();
}

}  // namespace json_detail

using namespace json_detail;

std::string dump_json(const Json& document) { return document.dump(2) + "\n"; }

Json parse_json(std::string_view text, std::string_view what) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::schema, fmt::format("{} is not valid JSON: {}", what, e.what()), "$");
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::not_found, fmt::format("cannot open '{}'", path.string()));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::invalid_input, fmt::format("cannot write '{}'", path.string()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

Json read_json_file(const std::filesystem::path& path) {
  return parse_json(read_text_file(path), path.string());
}

std::string content_hash(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return fmt::format("fnv1a64:{:016x}", hash);
}

Json to_json(const DimensionSpec& spec) {
  Json node = {{"id", spec.id}, {"domain", spec.domain}, {"kind", to_string(spec.kind)}};
  if (spec.is_continuous()) {
    node["unit"] = spec.unit;
    node["range"] = Json::array({spec.range.min, spec.range.max});
  } else {
    node["categories"] = spec.categories;
  }
  return node;
}

DimensionSpec dimension_from_json(const Json& node, const std::string& path) {
  require_object(node, path);
  DimensionSpec spec;
  spec.id = require_string(require(node, "id", path), join_path(path, "id"));
  spec.domain = node.contains("domain") ? require_string(node["domain"], join_path(path, "domain")) : spec.id;
  try {
    spec.kind = dimension_kind_from_string(require_string(require(node, "kind", path), join_path(path, "kind")));
  } catch (const Error& e) {
    throw Error(ErrorKind::schema, e.what(), join_path(path, "kind"));
  }
  switch (spec.kind) {
    case DimensionKind::continuous: {
      if (node.contains("unit")) spec.unit = require_string(node["unit"], join_path(path, "unit"));
      const auto range_path = join_path(path, "range");
      const auto& range = require_array(require(node, "range", path), range_path);
      if (range.size() != 2) throw Error(ErrorKind::schema, fmt::format("'{}' must have two entries", range_path), range_path);
      spec.range = {require_number(range[0], range_path + "[0]"), require_number(range[1], range_path + "[1]")};
      break;
    }
    case DimensionKind::nominal: {
      const auto cats_path = join_path(path, "categories");
      const auto& cats = require_array(require(node, "categories", path), cats_path);
      for (std::size_t i = 0; i < cats.size(); ++i) {
        spec.categories.push_back(require_string(cats[i], fmt::format("{}[{}]", cats_path, i)));
      }
      break;
    }
    case DimensionKind::binary:
      spec.categories = {"0", "1"};
      break;
  }
  return spec;
}

std::vector<DimensionSpec> dimensions_from_json(const Json& node, const std::string& path) {
  require_array(node, path);
  std::vector<DimensionSpec> dims;
  dims.reserve(node.size());
  for (std::size_t i = 0; i < node.size(); ++i) {
    dims.push_back(dimension_from_json(node[i], fmt::format("{}[{}]", path, i)));
  }
  return dims;
}

Json value_to_json(const Value& value, const DimensionSpec& spec) {
  if (const auto* number = std::get_if<double>(&value)) return *number;
  const auto& label = std::get<std::string>(value);
  if (spec.kind == DimensionKind::binary) return label == "1" ? 1 : 0;
  return label;
}

Value value_from_json(const Json& node, const DimensionSpec& spec, const std::string& path) {
  Value value;
  switch (spec.kind) {
    case DimensionKind::continuous:
      value = require_number(node, path);
      break;
    case DimensionKind::nominal:
      value = require_string(node, path);
      break;
    case DimensionKind::binary:
      if (node.is_boolean()) {
        value = std::string(node.get<bool>() ? "1" : "0");
      } else if (node.is_number()) {
        const double number = node.get<double>();
        if (number != 0.0 && number != 1.0) {
          throw Error(ErrorKind::schema, fmt::format("'{}' must be 0 or 1", path), path);
        }
        value = std::string(number == 1.0 ? "1" : "0");
      } else {
        value = require_string(node, path);
      }
      break;
  }
  try {
    check_value(spec, value);
  } catch (const Error& e) {
    throw Error(ErrorKind::schema, e.what(), path);
  }
  return value;
}

namespace {

const DimensionSpec* find_spec(const std::vector<DimensionSpec>& dims, std::string_view id) {
  for (const auto& spec : dims) {
    if (spec.id == id) return &spec;
  }
  return nullptr;
}

}  // namespace

Json to_json(const Instance& instance, const std::vector<DimensionSpec>& dimensions) {
  Json values = Json::object();
  for (const auto& [dim, value] : instance.values) {
    const auto* spec = find_spec(dimensions, dim);
    values[dim] = spec != nullptr ? value_to_json(value, *spec) : Json(format_value(value));
  }
  Json node = {{"id", instance.id}, {"values", std::move(values)}};
  if (instance.label) node["label"] = *instance.label;
  return node;
}

Instance instance_from_json(const Json& node, const std::vector<DimensionSpec>& dimensions,
                            const std::string& path) {
  require_object(node, path);
  Instance instance;
  if (node.contains("id")) instance.id = require_string(node["id"], join_path(path, "id"));
  if (node.contains("label") && !node["label"].is_null()) {
    instance.label = require_string(node["label"], join_path(path, "label"));
  }
  const auto values_path = join_path(path, "values");
  const auto& values = require_object(require(node, "values", path), values_path);
  for (const auto& [key, raw] : values.items()) {
    const auto field = join_path(values_path, key);
    const auto* spec = find_spec(dimensions, key);
    if (spec == nullptr) throw Error(ErrorKind::schema, fmt::format("unknown dimension key '{}'", key), field);
    instance.values.emplace(key, value_from_json(raw, *spec, field));
  }
  return instance;
}

Json to_json(const MembershipFunction& mf) {
  if (const auto* g = std::get_if<GaussianMembership>(&mf.shape)) {
    return {{"kind", "gaussian"}, {"center", g->center}, {"width", g->width}, {"floor", mf.floor}};
  }
  return {{"kind", "nominal_table"}, {"table", std::get<NominalTable>(mf.shape).table}, {"floor", mf.floor}};
}

MembershipFunction membership_from_json(const Json& node, const std::string& path) {
  MembershipFunction mf;
  const auto kind = require_string(require(node, "kind", path), join_path(path, "kind"));
  if (node.contains("floor")) mf.floor = require_number(node["floor"], join_path(path, "floor"));
  if (kind == "gaussian") {
    mf.shape = GaussianMembership{require_number(require(node, "center", path), join_path(path, "center")),
                                  require_number(require(node, "width", path), join_path(path, "width"))};
  } else if (kind == "nominal_table") {
    const auto table_path = join_path(path, "table");
    const auto& table = require_object(require(node, "table", path), table_path);
    NominalTable nominal;
    for (const auto& [key, mu] : table.items()) nominal.table[key] = require_number(mu, join_path(table_path, key));
    mf.shape = std::move(nominal);
  } else {
    throw Error(ErrorKind::schema, fmt::format("unknown membership kind '{}'", kind), join_path(path, "kind"));
  }
  return mf;
}

Json to_json(const ConceptualSpace& space) {
  Json dims = Json::array();
  for (const auto& spec : space.dimensions) dims.push_back(to_json(spec));

  Json standardization = Json::object();
  for (const auto& [dim, b] : space.standardization) standardization[dim] = Json::array({b.min, b.max});

  Json concepts = Json::object();
  for (const auto& [key, c] : space.concepts) {
    Json prototype = Json::object();
    for (const auto& [dim, value] : c.prototype) {
      const auto* spec = space.find_dimension(dim);
      prototype[dim] = spec != nullptr ? value_to_json(value, *spec) : Json(format_value(value));
    }
    Json memberships = Json::object();
    for (const auto& [dim, mf] : c.memberships) memberships[dim] = to_json(mf);
    concepts[key] = {{"id", c.id},
                     {"prototype", std::move(prototype)},
                     {"memberships", std::move(memberships)},
                     {"weights", c.weights},
                     {"support", c.support}};
  }
  return {{"schema_version", space.schema_version},
          {"dimensions", std::move(dims)},
          {"standardization", std::move(standardization)},
          {"concepts", std::move(concepts)},
          {"params",
           {{"epsilon", space.params.epsilon}, {"w_min", space.params.w_min}, {"delta", space.params.delta}}}};
}

ConceptualSpace space_from_json(const Json& node) {
  ConceptualSpace space;
  require_object(node, "");
  space.schema_version = require_string(require(node, "schema_version", ""), "schema_version");
  if (space.schema_version != kSchemaVersion) {
    throw Error(ErrorKind::invalid_model,
                fmt::format("unsupported model schema version '{}'", space.schema_version), "schema_version");
  }
  space.dimensions = dimensions_from_json(require(node, "dimensions", ""), "dimensions");

  const auto& standardization = require_object(require(node, "standardization", ""), "standardization");
  for (const auto& [dim, bounds] : standardization.items()) {
    const auto path = join_path("standardization", dim);
    require_array(bounds, path);
    if (bounds.size() != 2) throw Error(ErrorKind::schema, fmt::format("'{}' must have two entries", path), path);
    space.standardization[dim] = {require_number(bounds[0], path + "[0]"), require_number(bounds[1], path + "[1]")};
  }

  if (node.contains("params")) {
    const auto& params = require_object(node["params"], "params");
    if (params.contains("epsilon")) space.params.epsilon = require_number(params["epsilon"], "params.epsilon");
    if (params.contains("w_min")) space.params.w_min = require_number(params["w_min"], "params.w_min");
    if (params.contains("delta")) space.params.delta = require_number(params["delta"], "params.delta");
  }

  const auto& concepts = require_object(require(node, "concepts", ""), "concepts");
  for (const auto& [key, entry] : concepts.items()) {
    const auto path = join_path("concepts", key);
    Concept c;
    c.id = entry.contains("id") ? require_string(entry["id"], join_path(path, "id")) : key;

    const auto proto_path = join_path(path, "prototype");
    for (const auto& [dim, raw] : require_object(require(entry, "prototype", path), proto_path).items()) {
      const auto* spec = space.find_dimension(dim);
      const auto field = join_path(proto_path, dim);
      if (spec == nullptr) throw Error(ErrorKind::schema, fmt::format("unknown dimension key '{}'", dim), field);
      c.prototype.emplace(dim, value_from_json(raw, *spec, field));
    }
    const auto mem_path = join_path(path, "memberships");
    for (const auto& [dim, raw] : require_object(require(entry, "memberships", path), mem_path).items()) {
      c.memberships.emplace(dim, membership_from_json(raw, join_path(mem_path, dim)));
    }
    const auto weight_path = join_path(path, "weights");
    for (const auto& [dim, raw] : require_object(require(entry, "weights", path), weight_path).items()) {
      c.weights.emplace(dim, require_number(raw, join_path(weight_path, dim)));
    }
    const auto& support = require(entry, "support", path);
    if (!support.is_number_unsigned()) {
      throw Error(ErrorKind::schema, "'support' must be a non-negative integer", join_path(path, "support"));
    }
    c.support = support.get<std::size_t>();
    space.concepts.emplace(key, std::move(c));
  }
  return space;
}

std::string serialize_space(const ConceptualSpace& space) { return dump_json(to_json(space)); }

ConceptualSpace load_space(const std::filesystem::path& path) { return space_from_json(read_json_file(path)); }

void save_space(const ConceptualSpace& space, const std::filesystem::path& path) {
  write_text_file(path, serialize_space(space));
}

}  // namespace muw
