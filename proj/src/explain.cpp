#include "muw/explain.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include <fmt/format.h>

namespace muw {

std::vector<RankedWeight> feature_importance(const Concept& c) {
  double total = 0.0;
  for (const auto& [dim, w] : c.weights) total += w;
  std::vector<RankedWeight> ranking;
  ranking.reserve(c.weights.size());
  for (const auto& [dim, w] : c.weights) ranking.push_back({dim, total > 0.0 ? w / total : 0.0});
  std::stable_sort(ranking.begin(), ranking.end(),
                   [](const RankedWeight& a, const RankedWeight& b) { return a.weight > b.weight; });
  return ranking;
}

namespace {

bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

std::string lowercase(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string capitalize(std::string text) {
  if (!text.empty()) text[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(text[0])));
  return text;
}

std::string with_article(const std::string& noun) {
  return fmt::format("{} {}", !noun.empty() && is_vowel(noun.front()) ? "an" : "a", noun);
}

std::string plural(const std::string& noun) {
  for (const std::string_view suffix : {"s", "x", "z", "ch", "sh"}) {
    if (noun.size() >= suffix.size() && noun.compare(noun.size() - suffix.size(), suffix.size(), suffix) == 0) {
      return noun + "es";
    }
  }
  return noun + "s";
}

std::string join_and(const std::vector<std::string>& items) {
  if (items.empty()) return {};
  if (items.size() == 1) return items.front();
  std::string out;
  for (std::size_t i = 0; i + 1 < items.size(); ++i) out += (i == 0 ? "" : ", ") + items[i];
  return out + " and " + items.back();
}

std::size_t rank_of(const std::vector<RankedWeight>& ranking, const std::string& dim) {
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    if (ranking[i].dimension == dim) return i + 1;
  }
  return 0;
}

bool is_utilisation(const ConceptualSpace& space, const std::string& dim) {
  const auto* spec = space.find_dimension(dim);
  return spec != nullptr && spec->domain == kUtilisationDomain;
}

std::string winner_sentence(const Instance& instance, const ConceptualSpace& space, const ClassificationResult& result,
                            const ExplainOptions& options) {
  const auto name = lowercase(result.winner);
  const auto& dims = result.per_dimension.at(result.winner);

  double phys_num = 0.0;
  double phys_den = 0.0;
  std::vector<std::string> uses;
  for (const auto& [dim, score] : dims) {
    if (!score.covered) continue;
    if (is_utilisation(space, dim)) {
      const auto v = instance.values.find(dim);
      if (v != instance.values.end() && v->second == Value{std::string("1")}) uses.push_back(gerund(dim));
      continue;
    }
    phys_num += score.weight * *score.mu * *score.mu;
    phys_den += score.weight;
  }

  std::string sentence = fmt::format("I believe this is {}", with_article(name));
  const bool has_looks = phys_den > 0.0;
  const bool looks_similar = has_looks && std::sqrt(phys_num / phys_den) >= options.similar_threshold;
  if (has_looks) {
    sentence += looks_similar
                    ? fmt::format(" as it looks similar to other {} I've seen in the past", plural(name))
                    : fmt::format(" although it does not look like other {} I've seen in the past", plural(name));
  }
  if (!uses.empty()) {
    const auto used = fmt::format("it is used for {}", join_and(uses));
    if (!has_looks) {
      sentence += " as " + used;
    } else {
      sentence += (looks_similar ? ", and " : ", but ") + used;
    }
  }
  return sentence + ".";
}

}  // namespace

std::string gerund(std::string_view verb) {
  std::string v = lowercase(verb);
  if (v.size() >= 2 && v.compare(v.size() - 2, 2, "ie") == 0) return v.substr(0, v.size() - 2) + "ying";
  if (v.size() >= 2 && v.back() == 'e' && v[v.size() - 2] != 'e' && v[v.size() - 2] != 'y' && v[v.size() - 2] != 'o') {
    return v.substr(0, v.size() - 1) + "ing";
  }
  const auto vowel_groups = [&] {
    std::size_t groups = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (is_vowel(v[i]) && (i == 0 || !is_vowel(v[i - 1]))) ++groups;
    }
    return groups;
  }();
  if (v.size() >= 3 && vowel_groups == 1) {
    const char c1 = v[v.size() - 3];
    const char mid = v[v.size() - 2];
    const char last = v.back();
    if (!is_vowel(c1) && is_vowel(mid) && !is_vowel(last) && last != 'w' && last != 'x' && last != 'y') {
      return v + last + "ing";
    }
  }
  return v + "ing";
}

ExplanationReport explain(const Instance& instance, const ConceptualSpace& space, const ExplainOptions& options) {
  ExplanationReport report;
  report.result = classify(instance, space, options.classify);
  const auto& result = report.result;

  for (const auto& [id, dims] : result.per_dimension) {
    double total = 0.0;
    for (const auto& [dim, score] : dims) total += score.contribution;
    if (!(total > 0.0)) continue;
    auto& shares = report.shares[id];
    for (const auto& [dim, score] : dims) {
      if (score.covered) shares[dim] = score.contribution / total;
    }
  }

  const auto& winner = space.concept_at(result.winner);
  const auto ranking = feature_importance(winner);
  if (const auto it = report.shares.find(result.winner); it != report.shares.end()) {
    for (const auto& [dim, share] : it->second) {
      const auto& score = result.per_dimension.at(result.winner).at(dim);
      report.top_factors.push_back({dim, result.winner, score.weight, *score.mu, share, rank_of(ranking, dim)});
    }
  }
  std::stable_sort(report.top_factors.begin(), report.top_factors.end(), [](const Factor& a, const Factor& b) {
    if (a.share != b.share) return a.share > b.share;
    return a.weight_rank < b.weight_rank;
  });

  std::vector<std::string> sentences;
  if (result.disputable && result.runner_up) {
    sentences.push_back(fmt::format(
        "This classification is disputable: {} leads {} by only {:.4f} (delta {:.4f}).",
        lowercase(result.winner), lowercase(*result.runner_up), result.margin, result.delta));
  }
  if (result.rejected) {
    sentences.push_back(fmt::format("None of the known concepts fits well (best typicality {:.2f}).",
                                    result.scores.at(result.winner)));
  }
  sentences.push_back(winner_sentence(instance, space, result, options));
  const auto n = std::min(options.rationale_factors, report.top_factors.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto& f = report.top_factors[i];
    sentences.push_back(capitalize(fmt::format("it is {} to {} on {} (μ = {:.2f}, weight rank {}).",
                                               f.mu >= options.similar_threshold ? "similar" : "dissimilar",
                                               lowercase(f.concept_id), f.dimension, f.mu, f.weight_rank)));
  }
  for (std::size_t i = 0; i < sentences.size(); ++i) report.rationale += (i == 0 ? "" : " ") + sentences[i];

  for (const auto& [id, c] : space.concepts) {
    report.exemplars.emplace(id, Instance{fmt::format("prototype:{}", id), c.prototype, id});
  }

  ChartSeries bar_series{instance.id.empty() ? "typicality" : instance.id, {}};
  for (const auto& [id, score] : result.scores) {
    report.bar.labels.push_back(id);
    bar_series.values.emplace_back(score);
  }
  report.bar.series.push_back(std::move(bar_series));

  for (const auto& spec : space.dimensions) report.spider.labels.push_back(spec.id);
  for (const auto& [id, dims] : result.per_dimension) {
    ChartSeries series{id, {}};
    for (const auto& spec : space.dimensions) {
      const auto it = dims.find(spec.id);
      series.values.push_back(it != dims.end() && it->second.covered ? it->second.mu : std::nullopt);
    }
    report.spider.series.push_back(std::move(series));
  }
  return report;
}

ConceptualSpace apply_overrides(const ConceptualSpace& space, const WhatIfOverrides& overrides) {
  ConceptualSpace copy = space;
  for (const auto& [cid, dims] : overrides.weights) {
    const auto c = copy.concepts.find(cid);
    const auto base = fmt::format("overrides.weights.{}", cid);
    if (c == copy.concepts.end()) throw Error(ErrorKind::invalid_input, fmt::format("unknown concept '{}'", cid), base);
    for (const auto& [dim, w] : dims) {
      const auto field = fmt::format("{}.{}", base, dim);
      const auto it = c->second.weights.find(dim);
      if (it == c->second.weights.end()) {
        throw Error(ErrorKind::invalid_input, fmt::format("concept '{}' has no dimension '{}'", cid, dim), field);
      }
      if (!(w > 0.0 && w <= 1.0)) {
        throw Error(ErrorKind::invalid_input, fmt::format("weight override {} outside (0, 1]", w), field);
      }
      it->second = w;
    }
  }
  for (const auto& [cid, dims] : overrides.memberships) {
    const auto c = copy.concepts.find(cid);
    const auto base = fmt::format("overrides.memberships.{}", cid);
    if (c == copy.concepts.end()) throw Error(ErrorKind::invalid_input, fmt::format("unknown concept '{}'", cid), base);
    for (const auto& [dim, change] : dims) {
      const auto field = fmt::format("{}.{}", base, dim);
      const auto it = c->second.memberships.find(dim);
      if (it == c->second.memberships.end()) {
        throw Error(ErrorKind::invalid_input, fmt::format("concept '{}' has no dimension '{}'", cid, dim), field);
      }
      auto& mf = it->second;
      if (change.gaussian) {
        auto* g = std::get_if<GaussianMembership>(&mf.shape);
        if (g == nullptr) throw Error(ErrorKind::invalid_input, "gaussian override on a nominal dimension", field);
        if (change.gaussian->center) {
          if (!std::isfinite(*change.gaussian->center)) throw Error(ErrorKind::invalid_input, "center must be finite", field + ".center");
          g->center = *change.gaussian->center;
        }
        if (change.gaussian->width) {
          if (!(*change.gaussian->width > 0.0) || !std::isfinite(*change.gaussian->width)) {
            throw Error(ErrorKind::invalid_input, "width must be positive", field + ".width");
          }
          g->width = *change.gaussian->width;
        }
      }
      if (change.table) {
        auto* table = std::get_if<NominalTable>(&mf.shape);
        if (table == nullptr) throw Error(ErrorKind::invalid_input, "table override on a continuous dimension", field);
        const auto& spec = copy.dimension(dim);
        for (const auto& [category, mu] : *change.table) {
          const auto entry = fmt::format("{}.table.{}", field, category);
          if (std::find(spec.categories.begin(), spec.categories.end(), category) == spec.categories.end()) {
            throw Error(ErrorKind::invalid_input, fmt::format("'{}' is not a category of '{}'", category, dim), entry);
          }
          if (!(mu > 0.0 && mu <= 1.0)) throw Error(ErrorKind::invalid_input, "membership override outside (0, 1]", entry);
          table->table[category] = mu;
        }
      }
    }
  }
  return copy;
}

Instance apply_value_overrides(const Instance& instance, const WhatIfOverrides& overrides, const ConceptualSpace& space) {
  Instance copy = instance;
  for (const auto& [dim, value] : overrides.values) {
    const auto field = fmt::format("overrides.values.{}", dim);
    const auto* spec = space.find_dimension(dim);
    if (spec == nullptr) throw Error(ErrorKind::invalid_input, fmt::format("unknown dimension '{}'", dim), field);
    try {
      check_value(*spec, value);
    } catch (const Error& e) {
      throw Error(ErrorKind::invalid_input, e.what(), field);
    }
    copy.values[dim] = value;
  }
  return copy;
}

WhatIfResponse whatif(const WhatIfRequest& request, const ConceptualSpace& space) {
  const ClassifyOptions options{request.delta, std::nullopt};
  const auto altered_space = apply_overrides(space, request.overrides);
  const auto altered_instance = apply_value_overrides(request.instance, request.overrides, space);

  WhatIfResponse response;
  response.before = classify(request.instance, space, options);
  response.after = classify(altered_instance, altered_space, options);
  response.changed = response.before.winner != response.after.winner;
  for (const auto& [id, score] : response.after.scores) response.delta[id] = score - response.before.scores.at(id);
  return response;
}

namespace {

Json chart_to_json(const Chart& chart) {
  Json series = Json::array();
  for (const auto& s : chart.series) {
    Json values = Json::array();
    for (const auto& v : s.values) values.push_back(v ? Json(*v) : Json(nullptr));
    series.push_back({{"name", s.name}, {"values", std::move(values)}});
  }
  return {{"labels", chart.labels}, {"series", std::move(series)}};
}

}  // namespace

Json to_json(const std::vector<RankedWeight>& ranking) {
  Json out = Json::array();
  for (const auto& r : ranking) out.push_back({{"dimension", r.dimension}, {"weight", r.weight}});
  return out;
}

Json to_json(const ExplanationReport& report, const ConceptualSpace& space) {
  Json factors = Json::array();
  for (const auto& f : report.top_factors) {
    factors.push_back({{"dimension", f.dimension},
                       {"concept", f.concept_id},
                       {"w", f.weight},
                       {"mu", f.mu},
                       {"share", f.share},
                       {"weight_rank", f.weight_rank}});
  }
  Json exemplars = Json::object();
  for (const auto& [id, instance] : report.exemplars) exemplars[id] = to_json(instance, space.dimensions);
  return {{"result", to_json(report.result)},
          {"rationale", report.rationale},
          {"top_factors", std::move(factors)},
          {"shares", report.shares},
          {"exemplars", std::move(exemplars)},
          {"chart_data", {{"bar", chart_to_json(report.bar)}, {"spider", chart_to_json(report.spider)}}}};
}

Json to_json(const WhatIfResponse& response) {
  return {{"before", to_json(response.before)},
          {"after", to_json(response.after)},
          {"changed", response.changed},
          {"delta", response.delta}};
}

WhatIfRequest whatif_request_from_json(const Json& node, const ConceptualSpace& space) {
  using namespace json_detail;
  require_object(node, "");
  WhatIfRequest request;
  request.instance = instance_from_json(require(node, "instance", ""), space.dimensions, "instance");
  if (node.contains("delta") && !node["delta"].is_null()) request.delta = require_number(node["delta"], "delta");
  if (!node.contains("overrides") || node["overrides"].is_null()) return request;

  const auto& overrides = require_object(node["overrides"], "overrides");
  if (overrides.contains("weights")) {
    for (const auto& [cid, dims] : require_object(overrides["weights"], "overrides.weights").items()) {
      const auto base = join_path("overrides.weights", cid);
      for (const auto& [dim, w] : require_object(dims, base).items()) {
        request.overrides.weights[cid][dim] = require_number(w, join_path(base, dim));
      }
    }
  }
  if (overrides.contains("memberships")) {
    for (const auto& [cid, dims] : require_object(overrides["memberships"], "overrides.memberships").items()) {
      const auto base = join_path("overrides.memberships", cid);
      for (const auto& [dim, params] : require_object(dims, base).items()) {
        const auto path = join_path(base, dim);
        require_object(params, path);
        MembershipOverride change;
        if (params.contains("center") || params.contains("width")) {
          GaussianOverride g;
          if (params.contains("center")) g.center = require_number(params["center"], join_path(path, "center"));
          if (params.contains("width")) g.width = require_number(params["width"], join_path(path, "width"));
          change.gaussian = g;
        }
        if (params.contains("table")) {
          std::map<std::string, double> table;
          for (const auto& [category, mu] : require_object(params["table"], join_path(path, "table")).items()) {
            table[category] = require_number(mu, join_path(join_path(path, "table"), category));
          }
          change.table = std::move(table);
        }
        request.overrides.memberships[cid][dim] = std::move(change);
      }
    }
  }
  if (overrides.contains("values")) {
    for (const auto& [dim, raw] : require_object(overrides["values"], "overrides.values").items()) {
      const auto path = join_path("overrides.values", dim);
      const auto* spec = space.find_dimension(dim);
      if (spec == nullptr) throw Error(ErrorKind::schema, fmt::format("unknown dimension key '{}'", dim), path);
      request.overrides.values[dim] = value_from_json(raw, *spec, path);
    }
  }
  for (const auto& [key, unused] : overrides.items()) {
    if (key != "weights" && key != "memberships" && key != "values") {
      throw Error(ErrorKind::schema, fmt::format("unknown override group '{}'", key), join_path("overrides", key));
    }
  }
  return request;
}

}  // namespace muw
