#pragma once

// Synthetic labelled scenes standing in for a simulator: each class draws its
// property values from per-dimension generators, and utilisation dimensions
// come from a fixed grounding per class.

#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "muw/core.hpp"
#include "muw/learning.hpp"

namespace muw::scenegen {

/// Algorithm identifier recorded in every generated dataset header.
inline constexpr std::string_view kGeneratorId = "mt19937_64/u53/box-muller";

struct ConstantGen {
  Value value;
};

/// Truncated at mean +- 3 std by resampling, then clamped to the dimension range.
struct GaussianGen {
  double mean = 0.0;
  double std = 0.0;
};

struct CategoricalGen {
  std::map<std::string, double> probabilities;
};

using Generator = std::variant<ConstantGen, GaussianGen, CategoricalGen>;

struct ClassSpec {
  std::string concept_id;
  std::map<std::string, Generator> generators;
  /// Ground-truth utilisation values; utilisation dimensions not listed are 0.
  std::map<std::string, int> utilisation;
  std::size_t count = 1;
};

struct SceneConfig {
  std::string name;
  std::vector<DimensionSpec> dimensions;
  std::vector<ClassSpec> classes;
  std::uint64_t seed = 0;
};

/// Deterministic for a fixed seed. Throws invalid_input on bad generator parameters.
Dataset generate(const SceneConfig& config);

/// Built-in configs: "idealised", "drill-riveter", "four-artefacts".
std::vector<std::string> builtin_fixture_names();
/// Throws not_found for unknown names.
SceneConfig builtin_fixture(std::string_view name);

Json to_json(const SceneConfig& config);
SceneConfig scene_config_from_json(const Json& node);

/// Portable draws; no reliance on library distribution implementations.
class Random {
 public:
  explicit Random(std::uint64_t seed);
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace muw::scenegen
