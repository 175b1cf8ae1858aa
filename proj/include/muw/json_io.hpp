#pragma once

// JSON mapping for the core model. Objects use sorted keys, so dumps are
// stable and diffable; doubles are written in shortest round-trip form.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "muw/core.hpp"

namespace muw {

using Json = nlohmann::json;

/// Two-space indented dump with a trailing newline.
std::string dump_json(const Json& document);
Json parse_json(std::string_view text, std::string_view what = "document");

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);
Json read_json_file(const std::filesystem::path& path);

/// FNV-1a 64-bit digest rendered as "fnv1a64:<16 hex digits>".
std::string content_hash(std::string_view bytes);

Json to_json(const DimensionSpec& spec);
DimensionSpec dimension_from_json(const Json& node, const std::string& path);
std::vector<DimensionSpec> dimensions_from_json(const Json& node, const std::string& path);

Json value_to_json(const Value& value, const DimensionSpec& spec);
Value value_from_json(const Json& node, const DimensionSpec& spec, const std::string& path);

Json to_json(const Instance& instance, const std::vector<DimensionSpec>& dimensions);
/// Rejects unknown dimension keys and type-invalid values with a schema error naming the field.
Instance instance_from_json(const Json& node, const std::vector<DimensionSpec>& dimensions,
                            const std::string& path);

Json to_json(const MembershipFunction& mf);
MembershipFunction membership_from_json(const Json& node, const std::string& path);

Json to_json(const ConceptualSpace& space);
ConceptualSpace space_from_json(const Json& node);

std::string serialize_space(const ConceptualSpace& space);
ConceptualSpace load_space(const std::filesystem::path& path);
void save_space(const ConceptualSpace& space, const std::filesystem::path& path);

namespace json_detail {

const Json& require(const Json& node, std::string_view key, const std::string& path);
double require_number(const Json& node, const std::string& path);
std::string require_string(const Json& node, const std::string& path);
const Json& require_object(const Json& node, const std::string& path);
const Json& require_array(const Json& node, const std::string& path);
std::string join_path(const std::string& base, std::string_view key);

}  // namespace json_detail

}  // namespace muw
