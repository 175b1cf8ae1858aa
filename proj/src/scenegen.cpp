#include "muw/scenegen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

namespace muw::scenegen {

Random::Random(std::uint64_t seed) : engine_(seed) {}

double Random::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Random::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

namespace {

constexpr double kTruncation = 3.0;
constexpr int kMaxResamples = 1000;

std::string dim_field(const ClassSpec& cls, const std::string& dim) {
  return fmt::format("classes.{}.generators.{}", cls.concept_id, dim);
}

void validate_generator(const ClassSpec& cls, const DimensionSpec& spec, const Generator& gen) {
  const auto field = dim_field(cls, spec.id);
  if (const auto* constant = std::get_if<ConstantGen>(&gen)) {
    try {
      check_value(spec, constant->value);
    } catch (const Error& e) {
      throw Error(ErrorKind::invalid_input, e.what(), field);
    }
    if (spec.is_continuous()) {
      const double v = std::get<double>(constant->value);
      if (v < spec.range.min || v > spec.range.max) {
        throw Error(ErrorKind::invalid_input, fmt::format("constant {} outside the range of '{}'", v, spec.id), field);
      }
    }
    return;
  }
  if (const auto* gaussian = std::get_if<GaussianGen>(&gen)) {
    if (!spec.is_continuous()) throw Error(ErrorKind::invalid_input, "gaussian generator on a nominal dimension", field);
    if (!std::isfinite(gaussian->mean) || !std::isfinite(gaussian->std) || gaussian->std < 0.0) {
      throw Error(ErrorKind::invalid_input, "gaussian generator needs a finite mean and std >= 0", field);
    }
    return;
  }
  const auto& probs = std::get<CategoricalGen>(gen).probabilities;
  if (spec.is_continuous()) throw Error(ErrorKind::invalid_input, "categorical generator on a continuous dimension", field);
  double total = 0.0;
  for (const auto& [category, p] : probs) {
    if (std::find(spec.categories.begin(), spec.categories.end(), category) == spec.categories.end()) {
      throw Error(ErrorKind::invalid_input, fmt::format("'{}' is not a category of '{}'", category, spec.id), field);
    }
    if (!(p >= 0.0) || !std::isfinite(p)) throw Error(ErrorKind::invalid_input, "negative probability", field);
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw Error(ErrorKind::invalid_input, fmt::format("probabilities sum to {}, not 1", total), field);
  }
}

void validate(const SceneConfig& config) {
  if (config.dimensions.empty()) throw Error(ErrorKind::invalid_input, "scene config declares no dimensions");
  if (config.classes.empty()) throw Error(ErrorKind::invalid_input, "scene config declares no classes");
  for (const auto& spec : config.dimensions) {
    if (spec.is_continuous() && !(spec.range.min < spec.range.max)) {
      throw Error(ErrorKind::invalid_input, fmt::format("dimension '{}' has an empty range", spec.id), spec.id);
    }
  }
  const auto find = [&](const std::string& id) -> const DimensionSpec* {
    for (const auto& spec : config.dimensions) {
      if (spec.id == id) return &spec;
    }
    return nullptr;
  };
  for (const auto& cls : config.classes) {
    if (cls.count < 1) {
      throw Error(ErrorKind::invalid_input, fmt::format("class '{}' has count 0", cls.concept_id),
                  fmt::format("classes.{}.count", cls.concept_id));
    }
    for (const auto& [dim, gen] : cls.generators) {
      const auto* spec = find(dim);
      if (spec == nullptr) {
        throw Error(ErrorKind::invalid_input, fmt::format("unknown dimension '{}'", dim), dim_field(cls, dim));
      }
      validate_generator(cls, *spec, gen);
    }
    for (const auto& [dim, v] : cls.utilisation) {
      const auto* spec = find(dim);
      const auto field = fmt::format("classes.{}.utilisation.{}", cls.concept_id, dim);
      if (spec == nullptr || spec->kind != DimensionKind::binary) {
        throw Error(ErrorKind::invalid_input, fmt::format("'{}' is not a binary dimension", dim), field);
      }
      if (v != 0 && v != 1) throw Error(ErrorKind::invalid_input, "utilisation values must be 0 or 1", field);
    }
    for (const auto& spec : config.dimensions) {
      const bool grounded = spec.kind == DimensionKind::binary && spec.domain == "utilisation";
      if (!grounded && cls.generators.count(spec.id) == 0) {
        throw Error(ErrorKind::invalid_input,
                    fmt::format("class '{}' has no generator for dimension '{}'", cls.concept_id, spec.id),
                    dim_field(cls, spec.id));
      }
    }
  }
}

Value draw(const Generator& gen, const DimensionSpec& spec, Random& rng) {
  if (const auto* constant = std::get_if<ConstantGen>(&gen)) return constant->value;
  if (const auto* gaussian = std::get_if<GaussianGen>(&gen)) {
    if (gaussian->std == 0.0) return std::clamp(gaussian->mean, spec.range.min, spec.range.max);
    double z = rng.normal();
    for (int i = 0; i < kMaxResamples && std::abs(z) > kTruncation; ++i) z = rng.normal();
    z = std::clamp(z, -kTruncation, kTruncation);
    return std::clamp(gaussian->mean + gaussian->std * z, spec.range.min, spec.range.max);
  }
  const auto& probs = std::get<CategoricalGen>(gen).probabilities;
  const double u = rng.uniform();
  double cumulative = 0.0;
  const std::string* last = nullptr;
  for (const auto& [category, p] : probs) {
    if (p <= 0.0) continue;
    cumulative += p;
    last = &category;
    if (u < cumulative) return category;
  }
  return *last;
}

}  // namespace

Dataset generate(const SceneConfig& config) {
  validate(config);
  Random rng(config.seed);
  Dataset dataset;
  dataset.dimensions = config.dimensions;
  for (const auto& cls : config.classes) {
    for (std::size_t i = 0; i < cls.count; ++i) {
      Instance instance;
      instance.id = fmt::format("{}-{:03}", cls.concept_id, i + 1);
      instance.label = cls.concept_id;
      for (const auto& spec : config.dimensions) {
        if (const auto gen = cls.generators.find(spec.id); gen != cls.generators.end()) {
          instance.values.emplace(spec.id, draw(gen->second, spec, rng));
        } else {
          const auto u = cls.utilisation.find(spec.id);
          instance.values.emplace(spec.id, std::string(u != cls.utilisation.end() && u->second == 1 ? "1" : "0"));
        }
      }
      dataset.instances.push_back(std::move(instance));
    }
  }
  dataset.header = Json{{"fixture", config.name},
                        {"seed", config.seed},
                        {"generator", kGeneratorId},
                        {"config_hash", content_hash(to_json(config).dump())}};
  return dataset;
}

namespace {

GaussianGen normal(double mean, double std) { return {mean, std}; }
CategoricalGen pick(std::map<std::string, double> probabilities) { return {std::move(probabilities)}; }

SceneConfig idealised() {
  SceneConfig config;
  config.name = "idealised";
  config.seed = 1;
  config.dimensions = {DimensionSpec::continuous("hue", "colour", 0.0, 360.0, "deg"),
                       DimensionSpec::nominal("shape", "shape", {"cube", "sphere", "cylinder"})};
  config.classes = {
      {"Red Cube", {{"hue", ConstantGen{0.0}}, {"shape", ConstantGen{std::string("cube")}}}, {}, 5},
      {"Green Ball", {{"hue", ConstantGen{120.0}}, {"shape", ConstantGen{std::string("sphere")}}}, {}, 5},
  };
  return config;
}

std::vector<DimensionSpec> physical_dims(double max_length, double max_width, std::vector<std::string> shapes) {
  return {DimensionSpec::continuous("length", "size", 0.05, max_length, "m"),
          DimensionSpec::continuous("width", "size", 0.02, max_width, "m"),
          DimensionSpec::continuous("hue", "colour", 0.0, 360.0, "deg"),
          DimensionSpec::continuous("brightness", "colour", 0.0, 1.0),
          DimensionSpec::nominal("shape", "shape", std::move(shapes)),
          DimensionSpec::nominal("composition", "composition", {"plastic", "metal", "wood"})};
}

ClassSpec drill_class(std::size_t count) {
  return {"Drill",
          {{"length", normal(0.26, 0.03)},
           {"width", normal(0.08, 0.01)},
           {"hue", normal(30.0, 12.0)},
           {"brightness", normal(0.70, 0.08)},
           {"shape", pick({{"pistol", 0.9}, {"box", 0.1}})},
           {"composition", pick({{"plastic", 0.7}, {"metal", 0.3}})}},
          {{"drill", 1}},
          count};
}

ClassSpec riveter_class(std::size_t count) {
  return {"Riveter",
          {{"length", normal(0.28, 0.03)},
           {"width", normal(0.085, 0.01)},
           {"hue", normal(36.0, 12.0)},
           {"brightness", normal(0.65, 0.08)},
           {"shape", pick({{"pistol", 0.85}, {"straight", 0.15}})},
           {"composition", pick({{"metal", 0.55}, {"plastic", 0.45}})}},
          {{"rivet", 1}},
          count};
}

SceneConfig drill_riveter() {
  SceneConfig config;
  config.name = "drill-riveter";
  config.seed = 20221003;
  config.dimensions = physical_dims(0.6, 0.3, {"pistol", "straight", "box"});
  config.dimensions.push_back(DimensionSpec::binary("drill", "utilisation"));
  config.dimensions.push_back(DimensionSpec::binary("rivet", "utilisation"));
  config.classes = {drill_class(40), riveter_class(40)};
  return config;
}

SceneConfig four_artefacts() {
  SceneConfig config;
  config.name = "four-artefacts";
  config.seed = 20221004;
  config.dimensions = physical_dims(4.0, 2.0, {"pistol", "straight", "box", "vehicle"});
  for (const auto* dim : {"drill", "hammer", "lift", "rivet"}) {
    config.dimensions.push_back(DimensionSpec::binary(dim, "utilisation"));
  }
  ClassSpec hammer{"Hammer",
                   {{"length", normal(0.33, 0.04)},
                    {"width", normal(0.12, 0.02)},
                    {"hue", normal(20.0, 20.0)},
                    {"brightness", normal(0.40, 0.10)},
                    {"shape", pick({{"straight", 0.95}, {"pistol", 0.05}})},
                    {"composition", pick({{"metal", 0.5}, {"wood", 0.5}})}},
                   {{"hammer", 1}},
                   30};
  ClassSpec forklift{"Forklift",
                     {{"length", normal(2.6, 0.3)},
                      {"width", normal(1.1, 0.12)},
                      {"hue", normal(50.0, 8.0)},
                      {"brightness", normal(0.75, 0.05)},
                      {"shape", ConstantGen{std::string("vehicle")}},
                      {"composition", ConstantGen{std::string("metal")}}},
                     {{"lift", 1}},
                     30};
  config.classes = {drill_class(30), hammer, forklift, riveter_class(30)};
  return config;
}

}  // namespace

std::vector<std::string> builtin_fixture_names() { return {"drill-riveter", "four-artefacts", "idealised"}; }

SceneConfig builtin_fixture(std::string_view name) {
  if (name == "idealised") return idealised();
  if (name == "drill-riveter") return drill_riveter();
  if (name == "four-artefacts") return four_artefacts();
  throw Error(ErrorKind::not_found, fmt::format("no built-in scene fixture named '{}'", name), std::string(name));
}

namespace {

Json generator_to_json(const Generator& gen, const DimensionSpec* spec) {
  if (const auto* constant = std::get_if<ConstantGen>(&gen)) {
    return {{"constant", spec != nullptr ? value_to_json(constant->value, *spec) : Json(format_value(constant->value))}};
  }
  if (const auto* gaussian = std::get_if<GaussianGen>(&gen)) {
    return {{"gaussian", {{"mean", gaussian->mean}, {"std", gaussian->std}}}};
  }
  return {{"categorical", std::get<CategoricalGen>(gen).probabilities}};
}

}  // namespace

Json to_json(const SceneConfig& config) {
  Json dims = Json::array();
  for (const auto& spec : config.dimensions) dims.push_back(muw::to_json(spec));
  Json classes = Json::array();
  for (const auto& cls : config.classes) {
    Json gens = Json::object();
    for (const auto& [dim, gen] : cls.generators) {
      const DimensionSpec* spec = nullptr;
      for (const auto& s : config.dimensions) {
        if (s.id == dim) spec = &s;
      }
      gens[dim] = generator_to_json(gen, spec);
    }
    classes.push_back(
        {{"concept", cls.concept_id}, {"count", cls.count}, {"generators", std::move(gens)}, {"utilisation", cls.utilisation}});
  }
  return {{"name", config.name}, {"seed", config.seed}, {"dimensions", std::move(dims)}, {"classes", std::move(classes)}};
}

SceneConfig scene_config_from_json(const Json& node) {
  using namespace json_detail;
  require_object(node, "");
  SceneConfig config;
  if (node.contains("name")) config.name = require_string(node["name"], "name");
  const auto& seed = require(node, "seed", "");
  if (!seed.is_number_unsigned()) throw Error(ErrorKind::schema, "'seed' must be a non-negative integer", "seed");
  config.seed = seed.get<std::uint64_t>();
  config.dimensions = dimensions_from_json(require(node, "dimensions", ""), "dimensions");
  const auto& classes = require_array(require(node, "classes", ""), "classes");
  for (std::size_t i = 0; i < classes.size(); ++i) {
    const auto path = fmt::format("classes[{}]", i);
    ClassSpec cls;
    cls.concept_id = require_string(require(classes[i], "concept", path), join_path(path, "concept"));
    const auto& count = require(classes[i], "count", path);
    if (!count.is_number_unsigned()) throw Error(ErrorKind::schema, "'count' must be a non-negative integer", join_path(path, "count"));
    cls.count = count.get<std::size_t>();
    if (classes[i].contains("generators")) {
      const auto gens_path = join_path(path, "generators");
      for (const auto& [dim, raw] : require_object(classes[i]["generators"], gens_path).items()) {
        const auto gen_path = join_path(gens_path, dim);
        require_object(raw, gen_path);
        if (raw.contains("constant")) {
          const DimensionSpec* spec = nullptr;
          for (const auto& s : config.dimensions) {
            if (s.id == dim) spec = &s;
          }
          if (spec == nullptr) throw Error(ErrorKind::schema, fmt::format("unknown dimension '{}'", dim), gen_path);
          cls.generators[dim] = ConstantGen{value_from_json(raw["constant"], *spec, join_path(gen_path, "constant"))};
        } else if (raw.contains("gaussian")) {
          const auto g_path = join_path(gen_path, "gaussian");
          const auto& g = raw["gaussian"];
          cls.generators[dim] = GaussianGen{require_number(require(g, "mean", g_path), join_path(g_path, "mean")),
                                            require_number(require(g, "std", g_path), join_path(g_path, "std"))};
        } else if (raw.contains("categorical")) {
          const auto c_path = join_path(gen_path, "categorical");
          CategoricalGen cat;
          for (const auto& [category, p] : require_object(raw["categorical"], c_path).items()) {
            cat.probabilities[category] = require_number(p, join_path(c_path, category));
          }
          cls.generators[dim] = std::move(cat);
        } else {
          throw Error(ErrorKind::schema, "generator must be constant, gaussian or categorical", gen_path);
        }
      }
    }
    if (classes[i].contains("utilisation")) {
      const auto u_path = join_path(path, "utilisation");
      for (const auto& [dim, v] : require_object(classes[i]["utilisation"], u_path).items()) {
        if (!v.is_number_integer()) throw Error(ErrorKind::schema, "utilisation values must be 0 or 1", join_path(u_path, dim));
        cls.utilisation[dim] = v.get<int>();
      }
    }
    config.classes.push_back(std::move(cls));
  }
  return config;
}

}  // namespace muw::scenegen
