#pragma once

// Shared helpers for the test binaries: small hand-built spaces, a random
// space generator, and a from-scratch evaluation of the typicality model
// that does not call into the classifier.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "muw/core.hpp"

#ifndef MUW_SOURCE_DIR
#define MUW_SOURCE_DIR "."
#endif

namespace muw::testing {

inline std::string source_path(const std::string& relative) { return std::string(MUW_SOURCE_DIR) + "/" + relative; }

inline MembershipFunction gaussian(double center, double width) {
  return MembershipFunction{GaussianMembership{center, width}, kDefaultEpsilon};
}

inline MembershipFunction table(std::map<std::string, double> entries) {
  return MembershipFunction{NominalTable{std::move(entries)}, kDefaultEpsilon};
}

/// Continuous dimensions on [0, 1] so raw and standardized values coincide.
inline ConceptualSpace unit_space(const std::vector<std::string>& dims) {
  ConceptualSpace space;
  for (const auto& d : dims) {
    space.dimensions.push_back(DimensionSpec::continuous(d, d, 0.0, 1.0));
    space.standardization[d] = {0.0, 1.0};
  }
  return space;
}

inline Concept gaussian_concept(const std::string& id, const std::vector<std::string>& dims,
                                const std::vector<double>& centers, const std::vector<double>& widths,
                                const std::vector<double>& weights) {
  Concept c;
  c.id = id;
  c.support = 10;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    c.prototype[dims[i]] = centers[i];
    c.memberships[dims[i]] = gaussian(centers[i], widths[i]);
    c.weights[dims[i]] = weights[i];
  }
  return c;
}

inline Instance point(const std::string& id, const std::vector<std::string>& dims, const std::vector<double>& xs) {
  Instance inst;
  inst.id = id;
  for (std::size_t i = 0; i < dims.size(); ++i) inst.values[dims[i]] = xs[i];
  return inst;
}

// ---- brute-force typicality ----------------------------------------------

/// mu for one dimension straight from the closed forms.
inline double oracle_mu(const ConceptualSpace& space, const Concept& c, const std::string& dim, const Value& raw) {
  const auto& mf = c.memberships.at(dim);
  if (const auto* g = std::get_if<GaussianMembership>(&mf.shape)) {
    const auto b = space.standardization.at(dim);
    double x = (std::get<double>(raw) - b.min) / (b.max - b.min);
    x = std::min(1.0, std::max(0.0, x));
    const double d = x - g->center;
    return std::max(mf.floor, std::exp(-(d * d) / (2.0 * g->width * g->width)));
  }
  const auto& t = std::get<NominalTable>(mf.shape).table;
  const auto it = t.find(std::get<std::string>(raw));
  return it == t.end() ? mf.floor : it->second;
}

/// R_C = sqrt(sum_i (w_i / sum_k w_k) mu_i^2) over dimensions supplied by both.
inline double oracle_typicality(const ConceptualSpace& space, const Concept& c, const Instance& inst) {
  double wsum = 0.0;
  for (const auto& [dim, v] : inst.values) {
    if (c.weights.count(dim)) wsum += c.weights.at(dim);
  }
  if (wsum == 0.0) return 0.0;
  double r2 = 0.0;
  for (const auto& [dim, v] : inst.values) {
    if (!c.weights.count(dim)) continue;
    const double mu = oracle_mu(space, c, dim, v);
    r2 += (c.weights.at(dim) / wsum) * mu * mu;
  }
  return std::sqrt(r2);
}

/// Winner by plain scan; equal scores go to the smaller id because the map iterates in order.
inline std::string oracle_winner(const ConceptualSpace& space, const Instance& inst) {
  std::string best;
  double best_r = -1.0;
  for (const auto& [id, c] : space.concepts) {
    const double r = oracle_typicality(space, c, inst);
    if (r > best_r) {
      best_r = r;
      best = id;
    }
  }
  return best;
}

// ---- random spaces ---------------------------------------------------------

struct RandomSpaceOptions {
  int max_concepts = 4;
  int max_dims = 5;
  bool allow_nominal = true;
};

/// Space with 1..max_concepts concepts over 1..max_dims dimensions, mixing
/// continuous (declared range [0, 10]) and nominal dimensions.
inline ConceptualSpace random_space(std::mt19937_64& rng, const RandomSpaceOptions& options = {}) {
  std::uniform_int_distribution<int> n_concepts(1, options.max_concepts);
  std::uniform_int_distribution<int> n_dims(1, options.max_dims);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::vector<std::string> cats{"a", "b", "c"};

  ConceptualSpace space;
  const int dims = n_dims(rng);
  for (int d = 0; d < dims; ++d) {
    const auto id = "d" + std::to_string(d);
    if (options.allow_nominal && unit(rng) < 0.3) {
      space.dimensions.push_back(DimensionSpec::nominal(id, "dom", cats));
    } else {
      space.dimensions.push_back(DimensionSpec::continuous(id, "dom", 0.0, 10.0, "u"));
      space.standardization[id] = {0.0, 10.0};
    }
  }
  const int concepts = n_concepts(rng);
  for (int k = 0; k < concepts; ++k) {
    Concept c;
    c.id = std::string(1, static_cast<char>('A' + k));
    c.support = 5;
    for (const auto& spec : space.dimensions) {
      c.weights[spec.id] = 0.05 + 0.95 * unit(rng);
      if (spec.kind == DimensionKind::continuous) {
        const double center = unit(rng);
        c.prototype[spec.id] = center * 10.0;
        c.memberships[spec.id] = gaussian(center, 0.01 + 0.5 * unit(rng));
      } else {
        std::map<std::string, double> t;
        const auto mode = cats[static_cast<std::size_t>(unit(rng) * 3.0) % 3];
        for (const auto& cat : cats) t[cat] = cat == mode ? 1.0 : std::max(kDefaultEpsilon, unit(rng));
        c.prototype[spec.id] = mode;
        c.memberships[spec.id] = table(t);
      }
    }
    space.concepts[c.id] = std::move(c);
  }
  return space;
}

/// Instance over a random non-empty subset of the space's dimensions.
inline Instance random_instance(std::mt19937_64& rng, const ConceptualSpace& space, bool complete = false) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Instance inst;
  inst.id = "q";
  for (const auto& spec : space.dimensions) {
    if (!complete && unit(rng) < 0.25) continue;
    if (spec.kind == DimensionKind::continuous) {
      inst.values[spec.id] = unit(rng) * 10.0;
    } else {
      inst.values[spec.id] = spec.categories[static_cast<std::size_t>(unit(rng) * 3.0) % spec.categories.size()];
    }
  }
  if (inst.values.empty()) {
    const auto& spec = space.dimensions.front();
    inst.values[spec.id] = spec.kind == DimensionKind::continuous ? Value{5.0} : Value{spec.categories.front()};
  }
  return inst;
}

}  // namespace muw::testing
