#include "muw/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <fmt/format.h>

namespace muw {

double eval_membership(const MembershipFunction& mf, const Value& value) {
  if (const auto* g = std::get_if<GaussianMembership>(&mf.shape)) {
    const auto* x = std::get_if<double>(&value);
    if (x == nullptr) throw Error(ErrorKind::invalid_input, "gaussian membership needs a numeric value");
    if (!std::isfinite(*x)) throw Error(ErrorKind::invalid_input, "non-finite value");
    const double d = *x - g->center;
    return std::max(std::exp(-(d * d) / (2.0 * g->width * g->width)), mf.floor);
  }
  const auto* label = std::get_if<std::string>(&value);
  if (label == nullptr) throw Error(ErrorKind::invalid_input, "nominal membership needs a category value");
  const auto& table = std::get<NominalTable>(mf.shape).table;
  const auto it = table.find(*label);
  return it == table.end() ? mf.floor : std::max(it->second, mf.floor);
}

double membership_of(const ConceptualSpace& space, const Concept& c, const DimensionSpec& spec, const Value& raw) {
  const auto it = c.memberships.find(spec.id);
  if (it == c.memberships.end()) {
    throw Error(ErrorKind::invalid_model,
                fmt::format("concept '{}' has no membership for dimension '{}'", c.id, spec.id), spec.id);
  }
  try {
    if (spec.is_continuous()) return eval_membership(it->second, standardize(std::get<double>(raw), spec, space.bounds(spec.id)));
    return eval_membership(it->second, raw);
  } catch (const std::bad_variant_access&) {
    throw Error(ErrorKind::invalid_input, fmt::format("value kind mismatch on dimension '{}'", spec.id), spec.id);
  }
}

namespace {

struct ScoredDimension {
  std::string id;
  double weight;
  double mu;
};

// Dimensions supplied by both the instance and the concept, with raw weight and membership.
std::vector<ScoredDimension> overlap(const Instance& instance, const Concept& c, const ConceptualSpace& space) {
  std::vector<ScoredDimension> dims;
  for (const auto& [dim, value] : instance.values) {
    const auto& spec = space.dimension(dim);
    check_value(spec, value);
    const auto w = c.weights.find(dim);
    if (w == c.weights.end()) continue;
    dims.push_back({dim, w->second, membership_of(space, c, spec, value)});
  }
  if (dims.empty()) {
    throw Error(ErrorKind::no_overlap,
                fmt::format("instance '{}' shares no dimension with concept '{}'", instance.id, c.id));
  }
  return dims;
}

double weight_sum(const std::vector<ScoredDimension>& dims) {
  double total = 0.0;
  for (const auto& d : dims) total += d.weight;
  if (!(total > 0.0)) throw Error(ErrorKind::invalid_model, "concept weights sum to zero");
  return total;
}

}  // namespace

RepresentativenessVector representativeness(const Instance& instance, const Concept& c,
                                            const ConceptualSpace& space) {
  const auto dims = overlap(instance, c, space);
  const double total = weight_sum(dims);
  RepresentativenessVector vec;
  vec.concept_id = c.id;
  double acc = 0.0;
  for (const auto& d : dims) {
    vec.components[d.id] = std::sqrt(d.weight / total) * d.mu;
    acc += d.weight * d.mu * d.mu;
  }
  // Same single division as typicality(), so norm and R agree bit for bit.
  vec.norm = std::sqrt(std::min(acc / total, 1.0));
  return vec;
}

double typicality(const Instance& instance, const Concept& c, const ConceptualSpace& space) {
  const auto dims = overlap(instance, c, space);
  const double total = weight_sum(dims);
  double acc = 0.0;
  for (const auto& d : dims) acc += d.weight * d.mu * d.mu;
  // Dividing once keeps R exactly 1 when every membership is 1.
  return std::sqrt(std::min(acc / total, 1.0));
}

namespace {

std::map<std::string, DimensionScore> breakdown(const Instance& instance, const Concept& c,
                                                const ConceptualSpace& space) {
  std::map<std::string, DimensionScore> scores;
  double total = 0.0;
  for (const auto& [dim, value] : instance.values) {
    if (const auto w = c.weights.find(dim); w != c.weights.end()) total += w->second;
  }
  std::set<std::string> keys;
  for (const auto& [dim, w] : c.weights) keys.insert(dim);
  for (const auto& [dim, v] : instance.values) keys.insert(dim);
  for (const auto& dim : keys) {
    DimensionScore score;
    const auto w = c.weights.find(dim);
    const auto v = instance.values.find(dim);
    if (w != c.weights.end()) score.weight = w->second;
    if (w != c.weights.end() && v != instance.values.end() && total > 0.0) {
      score.covered = true;
      score.mu = membership_of(space, c, space.dimension(dim), v->second);
      score.normalized_weight = w->second / total;
      score.contribution = score.normalized_weight * *score.mu * *score.mu;
    }
    scores.emplace(dim, score);
  }
  return scores;
}

}  // namespace

ClassificationResult classify(const Instance& instance, const ConceptualSpace& space,
                              const ClassifyOptions& options) {
  if (space.concepts.empty()) throw Error(ErrorKind::invalid_model, "model has no concepts");
  for (const auto& [dim, value] : instance.values) check_value(space.dimension(dim), value);

  ClassificationResult result;
  result.delta = options.delta.value_or(space.params.delta);
  if (!(result.delta >= 0.0) || !std::isfinite(result.delta)) {
    throw Error(ErrorKind::invalid_input, fmt::format("delta {} must be a finite non-negative number", result.delta), "delta");
  }

  for (const auto& [id, c] : space.concepts) {
    try {
      result.scores[id] = typicality(instance, c, space);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::no_overlap) throw;
      result.scores[id] = 0.0;
      result.warnings.push_back(fmt::format("concept '{}' shares no dimension with the instance; scored 0", id));
    }
    result.per_dimension.emplace(id, breakdown(instance, c, space));
  }

  // Map order is lexicographic; strict comparisons keep the smallest id on ties.
  double best = -1.0;
  for (const auto& [id, score] : result.scores) {
    if (score > best) {
      best = score;
      result.winner = id;
    }
  }
  double second = 0.0;
  bool tied = false;
  for (const auto& [id, score] : result.scores) {
    if (id == result.winner) continue;
    if (!result.runner_up || score > second) {
      second = score;
      result.runner_up = id;
    }
    if (score == best) tied = true;
  }
  result.margin = best - second;
  result.disputable = tied || result.margin < result.delta;
  if (options.min_typicality) result.rejected = best < *options.min_typicality;
  return result;
}

std::string voronoi_assign(const Instance& point, const ConceptualSpace& space) {
  if (space.concepts.empty()) throw Error(ErrorKind::invalid_model, "model has no concepts");
  for (const auto& spec : space.dimensions) {
    if (spec.is_continuous() && point.values.count(spec.id) == 0) {
      throw Error(ErrorKind::invalid_input,
                  fmt::format("point '{}' lacks continuous dimension '{}'", point.id, spec.id), spec.id);
    }
  }
  for (const auto& [dim, value] : point.values) check_value(space.dimension(dim), value);

  std::string nearest;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [id, c] : space.concepts) {
    double d2 = 0.0;
    for (const auto& [dim, proto] : c.prototype) {
      const auto v = point.values.find(dim);
      if (v == point.values.end()) continue;
      const auto& spec = space.dimension(dim);
      if (spec.is_continuous()) {
        const Bounds b = space.bounds(dim);
        const double diff = standardize(std::get<double>(v->second), spec, b) - standardize(std::get<double>(proto), spec, b);
        d2 += diff * diff;
      } else if (v->second != proto) {
        d2 += 1.0;
      }
    }
    if (d2 < best) {
      best = d2;
      nearest = id;
    }
  }
  return nearest;
}

Json to_json(const RepresentativenessVector& vector) {
  return {{"concept", vector.concept_id}, {"components", vector.components}, {"norm", vector.norm}};
}

Json to_json(const ClassificationResult& result) {
  Json per_dimension = Json::object();
  for (const auto& [id, dims] : result.per_dimension) {
    Json entry = Json::object();
    for (const auto& [dim, s] : dims) {
      entry[dim] = {{"mu", s.mu ? Json(*s.mu) : Json(nullptr)},
                    {"w", s.weight},
                    {"normalized_w", s.normalized_weight},
                    {"contribution", s.contribution},
                    {"covered", s.covered}};
    }
    per_dimension[id] = std::move(entry);
  }
  return {{"winner", result.winner},
          {"runner_up", result.runner_up ? Json(*result.runner_up) : Json(nullptr)},
          {"scores", result.scores},
          {"disputable", result.disputable},
          {"margin", result.margin},
          {"delta", result.delta},
          {"rejected", result.rejected},
          {"per_dimension", std::move(per_dimension)},
          {"warnings", result.warnings}};
}

}  // namespace muw
