#include "muw/knowledge.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <set>

#include <fmt/format.h>

namespace muw::knowledge {

std::string_view to_string(Provenance provenance) noexcept {
  switch (provenance) {
    case Provenance::wordnet_edge: return "wordnet_edge";
    case Provenance::crowd_edge: return "crowd_edge";
    case Provenance::stem_fallback: return "stem_fallback";
    case Provenance::none: return "none";
  }
  return "none";
}

std::string_view to_string(EdgeSource source) noexcept {
  return source == EdgeSource::wordnet ? "wordnet" : "crowd";
}

std::string normalize_label(std::string_view label) {
  std::string out;
  bool pending_space = false;
  for (const char raw : label) {
    const auto c = static_cast<unsigned char>(raw);
    if (std::isspace(c) || c == '_') {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back('_');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

namespace {

const std::vector<SynsetEntry>* entries_of(std::string_view lemma, const KnowledgeFixture& fixture) {
  const auto it = fixture.wordnet.find(std::string(lemma));
  return it == fixture.wordnet.end() ? nullptr : &it->second;
}

bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

// "runn" -> "run", "planned" stem "plann" -> "plan".
std::optional<std::string> undouble(std::string_view stem) {
  if (stem.size() < 3) return std::nullopt;
  const char last = stem.back();
  if (last != stem[stem.size() - 2] || is_vowel(last)) return std::nullopt;
  return std::string(stem.substr(0, stem.size() - 1));
}

bool ends_with(std::string_view text, std::string_view suffix) {
  return text.size() >= suffix.size() && text.substr(text.size() - suffix.size()) == suffix;
}

void push_unique(std::vector<std::string>& out, std::string value) {
  if (!value.empty() && std::find(out.begin(), out.end(), value) == out.end()) out.push_back(std::move(value));
}

bool is_physical(const SynsetEntry& entry, const PipelineConfig& config) {
  return entry.pos == "v" && std::find(config.physical_lexnames.begin(), config.physical_lexnames.end(),
                                       entry.lexname) != config.physical_lexnames.end();
}

std::set<std::string> physical_synsets(std::string_view verb, const KnowledgeFixture& fixture,
                                       const PipelineConfig& config) {
  std::set<std::string> ids;
  if (const auto* entries = entries_of(verb, fixture)) {
    for (const auto& entry : *entries) {
      if (is_physical(entry, config)) ids.insert(entry.id);
    }
  }
  return ids;
}

}  // namespace

bool has_verb_reading(std::string_view lemma, const KnowledgeFixture& fixture) {
  const auto* entries = entries_of(lemma, fixture);
  return entries != nullptr &&
         std::any_of(entries->begin(), entries->end(), [](const SynsetEntry& e) { return e.pos == "v"; });
}

std::vector<std::string> lemma_candidates(std::string_view token) {
  std::vector<std::string> out;
  push_unique(out, std::string(token));
  const auto strip = [&](std::size_t n) { return std::string(token.substr(0, token.size() - n)); };
  if (ends_with(token, "ing") && token.size() > 4) {
    const auto base = strip(3);
    push_unique(out, base);
    push_unique(out, base + "e");
    if (const auto single = undouble(base)) push_unique(out, *single);
  } else if (ends_with(token, "ied") && token.size() > 4) {
    push_unique(out, strip(3) + "y");
  } else if (ends_with(token, "ed") && token.size() > 3) {
    const auto base = strip(2);
    push_unique(out, base);
    push_unique(out, strip(1));
    if (const auto single = undouble(base)) push_unique(out, *single);
  } else if (ends_with(token, "ies") && token.size() > 4) {
    push_unique(out, strip(3) + "y");
  } else if (ends_with(token, "es") && token.size() > 3) {
    push_unique(out, strip(2));
    push_unique(out, strip(1));
  } else if (ends_with(token, "s") && !ends_with(token, "ss") && token.size() > 2) {
    push_unique(out, strip(1));
  }
  return out;
}

std::optional<std::string> extract_verb(std::string_view phrase, const KnowledgeFixture& fixture) {
  std::string token;
  const auto try_token = [&]() -> std::optional<std::string> {
    if (token.empty()) return std::nullopt;
    for (const auto& candidate : lemma_candidates(token)) {
      if (has_verb_reading(candidate, fixture)) return candidate;
    }
    return std::nullopt;
  };
  for (const char raw : phrase) {
    const auto c = static_cast<unsigned char>(raw);
    if (std::isalpha(c) || c == '-') {
      token.push_back(static_cast<char>(std::tolower(c)));
      continue;
    }
    if (auto verb = try_token()) return verb;
    token.clear();
  }
  return try_token();
}

std::string select_synset(std::string_view label, const KnowledgeFixture& fixture) {
  const auto lemma = normalize_label(label);
  const auto* entries = entries_of(lemma, fixture);
  std::optional<std::string> best;
  double best_score = -1.0;
  if (entries != nullptr) {
    for (const auto& entry : *entries) {
      if (entry.pos != "n" || entry.lexname != "noun.artifact") continue;
      double score = 0.0;
      for (const auto& member : entry.lemmas) {
        if (const auto* member_entries = entries_of(member, fixture)) {
          for (const auto& other : *member_entries) {
            if (other.id == entry.id) score += other.count;
          }
        }
      }
      if (score > best_score || (score == best_score && entry.id < *best)) {
        best_score = score;
        best = entry.id;
      }
    }
  }
  if (!best) throw Error(ErrorKind::not_found, fmt::format("no artefact-noun synset for '{}'", lemma), lemma);
  return *best;
}

std::vector<std::string> synset_lemmas(std::string_view synset_id, const KnowledgeFixture& fixture) {
  for (const auto& [lemma, entries] : fixture.wordnet) {
    for (const auto& entry : entries) {
      if (entry.id == synset_id) return entry.lemmas;
    }
  }
  return {};
}

MinedVerbs mine_stage(std::span<const std::string> lemmas, EdgeSource source, const KnowledgeFixture& fixture,
                      const PipelineConfig& config) {
  std::set<std::string> starts;
  for (const auto& lemma : lemmas) starts.insert(normalize_label(lemma));

  MinedVerbs mined;
  for (const auto& edge : fixture.conceptnet_edges) {
    if (edge.source != source || edge.relation != "UsedFor") continue;
    if (starts.count(normalize_label(edge.start)) == 0) continue;
    if (source == EdgeSource::crowd && !(edge.weight > config.crowd_weight_threshold)) continue;
    if (auto verb = extract_verb(edge.end, fixture)) {
      push_unique(mined.verbs, *verb);
      mined.sources.emplace_back(edge, *verb);
    }
  }
  if (!mined.verbs.empty()) {
    mined.provenance = source == EdgeSource::wordnet ? Provenance::wordnet_edge : Provenance::crowd_edge;
  }
  return mined;
}

MinedVerbs mine_usedfor(std::span<const std::string> lemmas, const KnowledgeFixture& fixture,
                        const PipelineConfig& config) {
  auto mined = mine_stage(lemmas, EdgeSource::wordnet, fixture, config);
  if (!mined.verbs.empty()) return mined;
  return mine_stage(lemmas, EdgeSource::crowd, fixture, config);
}

std::optional<std::string> stem_fallback(std::string_view label, const KnowledgeFixture& fixture) {
  const auto lemma = normalize_label(label);
  if (lemma.empty()) return std::nullopt;
  if (has_verb_reading(lemma, fixture)) return lemma;
  for (const std::string_view suffix : {"er", "or"}) {
    if (!ends_with(lemma, suffix) || lemma.size() < suffix.size() + 3) continue;
    const std::string stem = lemma.substr(0, lemma.size() - suffix.size());
    std::vector<std::string> candidates{stem};
    if (const auto single = undouble(stem)) candidates.push_back(*single);
    candidates.push_back(stem + "e");
    for (const auto& candidate : candidates) {
      if (has_verb_reading(candidate, fixture)) return candidate;
    }
  }
  return std::nullopt;
}

std::vector<std::string> filter_physical(std::span<const std::string> verbs, const KnowledgeFixture& fixture,
                                         const PipelineConfig& config) {
  std::vector<std::string> kept;
  for (const auto& verb : verbs) {
    if (!physical_synsets(verb, fixture, config).empty()) push_unique(kept, verb);
  }
  return kept;
}

std::map<std::string, double> softmax_grounding(std::span<const std::pair<std::string, double>> entries) {
  if (entries.empty()) throw Error(ErrorKind::invalid_input, "softmax needs at least one entry");
  double peak = -std::numeric_limits<double>::infinity();
  for (const auto& [key, weight] : entries) {
    if (!std::isfinite(weight)) throw Error(ErrorKind::invalid_input, fmt::format("non-finite weight for '{}'", key), key);
    peak = std::max(peak, weight);
  }
  std::map<std::string, double> mu;
  double total = 0.0;
  for (const auto& [key, weight] : entries) {
    const double e = std::exp(weight - peak);
    if (!mu.emplace(key, e).second) {
      throw Error(ErrorKind::invalid_input, fmt::format("duplicate group '{}'", key), key);
    }
    total += e;
  }
  for (auto& [key, value] : mu) value /= total;
  return mu;
}

std::vector<std::pair<std::string, double>> group_by_verb(std::span<const std::pair<Edge, std::string>> sources) {
  std::map<std::string, double> sums;
  for (const auto& [edge, verb] : sources) sums[verb] += edge.weight;
  return {sums.begin(), sums.end()};
}

UtilisationGrounding ground_utilisation(std::string_view label, std::span<const std::string> target_dims,
                                        const KnowledgeFixture& fixture, const PipelineConfig& config) {
  UtilisationGrounding grounding;
  grounding.label = normalize_label(label);
  for (const auto& dim : target_dims) grounding.dims[dim] = 0;

  std::vector<std::string> lemmas;
  try {
    grounding.synset = select_synset(grounding.label, fixture);
    lemmas = synset_lemmas(*grounding.synset, fixture);
    if (std::find(lemmas.begin(), lemmas.end(), grounding.label) == lemmas.end()) lemmas.push_back(grounding.label);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::not_found) throw;
  }

  // A stage counts only if it leaves at least one physical verb; otherwise the next one runs.
  std::vector<std::pair<std::string, double>> weighted;
  if (!lemmas.empty()) {
    for (const auto source : {EdgeSource::wordnet, EdgeSource::crowd}) {
      const auto mined = mine_stage(lemmas, source, fixture, config);
      auto kept = filter_physical(mined.verbs, fixture, config);
      if (kept.empty()) continue;
      grounding.verbs = std::move(kept);
      grounding.provenance = mined.provenance;
      weighted = group_by_verb(mined.sources);
      break;
    }
  }
  if (grounding.provenance == Provenance::none) {
    if (const auto stem = stem_fallback(grounding.label, fixture)) {
      const std::vector<std::string> single{*stem};
      if (!filter_physical(single, fixture, config).empty()) {
        grounding.verbs = single;
        grounding.provenance = Provenance::stem_fallback;
        weighted = {{*stem, 1.0}};
      }
    }
  }
  if (grounding.provenance == Provenance::none) return grounding;

  grounding.groups = softmax_grounding(weighted);

  for (const auto& dim : target_dims) {
    std::set<std::string> refs;
    if (const auto it = fixture.utilisation_refs.find(dim); it != fixture.utilisation_refs.end()) {
      refs.insert(it->second.begin(), it->second.end());
    } else {
      refs = physical_synsets(dim, fixture, config);
    }
    DimensionEvidence evidence;
    for (const auto& verb : grounding.verbs) {
      const auto ids = physical_synsets(verb, fixture, config);
      const bool meets = std::any_of(ids.begin(), ids.end(), [&](const std::string& id) { return refs.count(id) > 0; });
      if (!meets) continue;
      evidence.verbs.push_back(verb);
      if (const auto g = grounding.groups.find(verb); g != grounding.groups.end()) evidence.mu += g->second;
    }
    if (!evidence.verbs.empty()) {
      grounding.dims[dim] = 1;
      grounding.evidence.emplace(dim, std::move(evidence));
    }
  }
  return grounding;
}

Json to_json(const KnowledgeFixture& fixture) {
  Json wordnet = Json::object();
  for (const auto& [lemma, entries] : fixture.wordnet) {
    Json list = Json::array();
    for (const auto& e : entries) {
      list.push_back({{"id", e.id}, {"pos", e.pos}, {"lexname", e.lexname}, {"count", e.count}, {"lemmas", e.lemmas}});
    }
    wordnet[lemma] = std::move(list);
  }
  Json edges = Json::array();
  for (const auto& e : fixture.conceptnet_edges) {
    edges.push_back({{"start", e.start}, {"relation", e.relation}, {"end", e.end}, {"weight", e.weight},
                     {"source", to_string(e.source)}});
  }
  Json node = Json::object();
  if (!fixture.wordnet.empty()) node["wordnet"] = std::move(wordnet);
  if (!fixture.conceptnet_edges.empty()) node["conceptnet_edges"] = std::move(edges);
  if (!fixture.utilisation_refs.empty()) node["utilisation_refs"] = fixture.utilisation_refs;
  return node;
}

KnowledgeFixture fixture_from_json(const Json& node, const std::string& path) {
  using namespace json_detail;
  require_object(node, path);
  KnowledgeFixture fixture;
  if (node.contains("wordnet")) {
    const auto wn_path = join_path(path, "wordnet");
    for (const auto& [lemma, list] : require_object(node["wordnet"], wn_path).items()) {
      const auto lemma_path = join_path(wn_path, lemma);
      require_array(list, lemma_path);
      auto& entries = fixture.wordnet[normalize_label(lemma)];
      for (std::size_t i = 0; i < list.size(); ++i) {
        const auto p = fmt::format("{}[{}]", lemma_path, i);
        SynsetEntry e;
        e.id = require_string(require(list[i], "id", p), join_path(p, "id"));
        e.pos = require_string(require(list[i], "pos", p), join_path(p, "pos"));
        e.lexname = require_string(require(list[i], "lexname", p), join_path(p, "lexname"));
        e.count = list[i].contains("count") ? require_number(list[i]["count"], join_path(p, "count")) : 0.0;
        if (e.count < 0) throw Error(ErrorKind::schema, "frequency count must be non-negative", join_path(p, "count"));
        const auto& members = require_array(require(list[i], "lemmas", p), join_path(p, "lemmas"));
        for (const auto& m : members) e.lemmas.push_back(normalize_label(require_string(m, join_path(p, "lemmas"))));
        entries.push_back(std::move(e));
      }
    }
  }
  if (node.contains("conceptnet_edges")) {
    const auto edges_path = join_path(path, "conceptnet_edges");
    const auto& edges = require_array(node["conceptnet_edges"], edges_path);
    for (std::size_t i = 0; i < edges.size(); ++i) {
      const auto p = fmt::format("{}[{}]", edges_path, i);
      Edge e;
      e.start = require_string(require(edges[i], "start", p), join_path(p, "start"));
      e.relation = require_string(require(edges[i], "relation", p), join_path(p, "relation"));
      e.end = require_string(require(edges[i], "end", p), join_path(p, "end"));
      e.weight = require_number(require(edges[i], "weight", p), join_path(p, "weight"));
      const auto source = require_string(require(edges[i], "source", p), join_path(p, "source"));
      if (source == "wordnet") {
        e.source = EdgeSource::wordnet;
      } else if (source == "crowd") {
        e.source = EdgeSource::crowd;
      } else {
        throw Error(ErrorKind::schema, fmt::format("unknown edge source '{}'", source), join_path(p, "source"));
      }
      fixture.conceptnet_edges.push_back(std::move(e));
    }
  }
  if (node.contains("utilisation_refs")) {
    const auto refs_path = join_path(path, "utilisation_refs");
    for (const auto& [dim, ids] : require_object(node["utilisation_refs"], refs_path).items()) {
      const auto p = join_path(refs_path, dim);
      for (const auto& id : require_array(ids, p)) fixture.utilisation_refs[dim].push_back(require_string(id, p));
    }
  }
  return fixture;
}

void merge_fixture(KnowledgeFixture& into, const KnowledgeFixture& extra) {
  for (const auto& [lemma, entries] : extra.wordnet) {
    auto& target = into.wordnet[lemma];
    for (const auto& entry : entries) {
      const bool known = std::any_of(target.begin(), target.end(), [&](const SynsetEntry& e) { return e.id == entry.id; });
      if (!known) target.push_back(entry);
    }
  }
  for (const auto& edge : extra.conceptnet_edges) {
    if (std::find(into.conceptnet_edges.begin(), into.conceptnet_edges.end(), edge) == into.conceptnet_edges.end()) {
      into.conceptnet_edges.push_back(edge);
    }
  }
  for (const auto& [dim, ids] : extra.utilisation_refs) {
    auto& target = into.utilisation_refs[dim];
    for (const auto& id : ids) push_unique(target, id);
  }
}

KnowledgeFixture load_fixture(const std::filesystem::path& path) {
  if (!std::filesystem::is_directory(path)) return fixture_from_json(read_json_file(path));
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(path)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  if (files.empty()) {
    throw Error(ErrorKind::not_found, fmt::format("no knowledge fixture files in '{}'", path.string()));
  }
  std::sort(files.begin(), files.end());
  KnowledgeFixture fixture;
  for (const auto& file : files) merge_fixture(fixture, fixture_from_json(read_json_file(file), file.filename().string()));
  return fixture;
}

Json to_json(const UtilisationGrounding& grounding) {
  Json evidence = Json::object();
  for (const auto& [dim, e] : grounding.evidence) evidence[dim] = {{"verbs", e.verbs}, {"mu", e.mu}};
  return {{"label", grounding.label},
          {"synset", grounding.synset ? Json(*grounding.synset) : Json(nullptr)},
          {"dims", grounding.dims},
          {"evidence", std::move(evidence)},
          {"groups", grounding.groups},
          {"verbs", grounding.verbs},
          {"provenance", to_string(grounding.provenance)}};
}

}  // namespace muw::knowledge
