#include "muw/knowledge_sources.hpp"

#include <array>
#include <charconv>
#include <map>
#include <memory>
#include <sstream>
#include <thread>
#include <tuple>

#include <fmt/format.h>

#include "httplib.h"

namespace muw::knowledge {

namespace {

constexpr std::array<std::string_view, 45> kLexnames = {
    "adj.all",         "adj.pert",          "adv.all",          "noun.Tops",       "noun.act",
    "noun.animal",     "noun.artifact",     "noun.attribute",   "noun.body",       "noun.cognition",
    "noun.communication", "noun.event",     "noun.feeling",     "noun.food",       "noun.group",
    "noun.location",   "noun.motive",       "noun.object",      "noun.person",     "noun.phenomenon",
    "noun.plant",      "noun.possession",   "noun.process",     "noun.quantity",   "noun.relation",
    "noun.shape",      "noun.state",        "noun.substance",   "noun.time",       "verb.body",
    "verb.change",     "verb.cognition",    "verb.communication", "verb.competition", "verb.consumption",
    "verb.contact",    "verb.creation",     "verb.emotion",     "verb.motion",     "verb.perception",
    "verb.possession", "verb.social",       "verb.stative",     "verb.weather",    "adj.ppl"};

std::vector<std::string> split_ws(std::string_view line) {
  std::vector<std::string> out;
  std::istringstream in{std::string(line)};
  std::string token;
  while (in >> token) out.push_back(token);
  return out;
}

template <typename T>
bool parse_int(std::string_view text, T& out, int base = 10) {
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out, base);
  return ec == std::errc{} && ptr == text.data() + text.size();
}

std::string lowercase(std::string text) {
  for (auto& c : text) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return text;
}

// (lemma, ss_type, lex_filenum, lex_id) as encoded in a sense key.
using SenseKey = std::tuple<std::string, int, int, int>;

std::map<SenseKey, double> read_counts(const std::filesystem::path& file) {
  std::map<SenseKey, double> counts;
  if (!std::filesystem::exists(file)) return counts;
  std::istringstream in(read_text_file(file));
  std::string line;
  while (std::getline(in, line)) {
    const auto fields = split_ws(line);
    if (fields.size() < 3) continue;
    const auto& key = fields[0];
    const auto pct = key.find('%');
    if (pct == std::string::npos) continue;
    const auto parts = key.substr(pct + 1);
    int ss_type = 0;
    int lex_filenum = 0;
    int lex_id = 0;
    std::istringstream p(parts);
    char colon = 0;
    if (!(p >> ss_type >> colon >> lex_filenum >> colon >> lex_id)) continue;
    int tag_cnt = 0;
    if (!parse_int(fields[2], tag_cnt)) continue;
    counts[{lowercase(key.substr(0, pct)), ss_type, lex_filenum, lex_id}] += tag_cnt;
  }
  return counts;
}

}  // namespace

std::string_view lexname_for(int lex_filenum) {
  if (lex_filenum < 0 || lex_filenum >= static_cast<int>(kLexnames.size())) return "unknown";
  return kLexnames[static_cast<std::size_t>(lex_filenum)];
}

bool parse_wordnet_data_line(std::string_view line, const std::vector<std::string>& lexnames, std::string& synset_id,
                             SynsetEntry& entry) {
  if (line.empty() || line.front() == ' ') return false;
  const auto bar = line.find(" | ");
  const auto fields = split_ws(line.substr(0, bar));
  if (fields.size() < 4) return false;

  int lex_filenum = 0;
  std::size_t word_count = 0;
  if (!parse_int(fields[1], lex_filenum) || !parse_int(fields[3], word_count, 16)) {
    throw Error(ErrorKind::schema, fmt::format("malformed WordNet data line for synset {}", fields[0]));
  }
  if (fields.size() < 4 + 2 * word_count) {
    throw Error(ErrorKind::schema, fmt::format("WordNet synset {} lists fewer words than declared", fields[0]));
  }
  std::string pos = fields[2];
  if (pos == "s") pos = "a";
  synset_id = fmt::format("{}-{}", fields[0], pos);
  entry = SynsetEntry{};
  entry.id = synset_id;
  entry.pos = pos;
  entry.lexname = lex_filenum < static_cast<int>(lexnames.size()) ? lexnames[static_cast<std::size_t>(lex_filenum)]
                                                                   : std::string(lexname_for(lex_filenum));
  for (std::size_t i = 0; i < word_count; ++i) {
    auto word = lowercase(fields[4 + 2 * i]);
    if (const auto paren = word.find('('); paren != std::string::npos) word.erase(paren);
    entry.lemmas.push_back(word);
  }
  return true;
}

KnowledgeFixture read_wordnet_database(const std::filesystem::path& dict_dir) {
  std::vector<std::string> lexnames(kLexnames.begin(), kLexnames.end());
  if (const auto file = dict_dir / "lexnames"; std::filesystem::exists(file)) {
    std::istringstream in(read_text_file(file));
    std::string line;
    while (std::getline(in, line)) {
      const auto fields = split_ws(line);
      int num = 0;
      if (fields.size() < 2 || !parse_int(fields[0], num) || num < 0) continue;
      if (static_cast<std::size_t>(num) >= lexnames.size()) lexnames.resize(static_cast<std::size_t>(num) + 1, "unknown");
      lexnames[static_cast<std::size_t>(num)] = fields[1];
    }
  }
  const auto counts = read_counts(dict_dir / "cntlist.rev");

  KnowledgeFixture fixture;
  bool any = false;
  for (const auto& [file, ss_type] : {std::pair{"data.noun", 1}, std::pair{"data.verb", 2}}) {
    const auto path = dict_dir / file;
    if (!std::filesystem::exists(path)) continue;
    any = true;
    std::istringstream in(read_text_file(path));
    std::string line;
    while (std::getline(in, line)) {
      std::string id;
      SynsetEntry entry;
      if (!parse_wordnet_data_line(line, lexnames, id, entry)) continue;
      const auto fields = split_ws(line);
      int lex_filenum = 0;
      parse_int(fields[1], lex_filenum);
      for (std::size_t i = 0; i < entry.lemmas.size(); ++i) {
        int lex_id = 0;
        parse_int(fields[5 + 2 * i], lex_id, 16);
        SynsetEntry indexed = entry;
        const auto it = counts.find({entry.lemmas[i], ss_type, lex_filenum, lex_id});
        indexed.count = it == counts.end() ? 0.0 : it->second;
        fixture.wordnet[entry.lemmas[i]].push_back(std::move(indexed));
      }
    }
  }
  if (!any) throw Error(ErrorKind::not_found, fmt::format("no WordNet data files in '{}'", dict_dir.string()));
  return fixture;
}

namespace {

std::string term_lemma(std::string_view term) {
  // "/c/en/drill/n/..." -> "drill"
  constexpr std::string_view prefix = "/c/en/";
  if (term.substr(0, prefix.size()) != prefix) return {};
  auto rest = term.substr(prefix.size());
  return std::string(rest.substr(0, rest.find('/')));
}

bool from_wordnet(const Json& edge) {
  if (const auto it = edge.find("dataset"); it != edge.end() && it->is_string()) {
    if (it->get<std::string>().rfind("/d/wordnet", 0) == 0) return true;
  }
  if (const auto it = edge.find("sources"); it != edge.end() && it->is_array()) {
    for (const auto& source : *it) {
      for (const auto* key : {"@id", "contributor"}) {
        if (source.contains(key) && source[key].is_string() &&
            source[key].get<std::string>().find("/s/resource/wordnet") != std::string::npos) {
          return true;
        }
      }
    }
  }
  return false;
}

struct HostGate {
  std::mutex mutex;
  std::chrono::steady_clock::time_point last{};
  bool used = false;
};

// One gate per host, shared by every client in the process.
std::shared_ptr<HostGate> gate_for(const std::string& host) {
  static std::mutex registry_mutex;
  static std::map<std::string, std::shared_ptr<HostGate>> registry;
  const std::lock_guard lock(registry_mutex);
  auto& gate = registry[host];
  if (!gate) gate = std::make_shared<HostGate>();
  return gate;
}

std::string url_encode(std::string_view text) {
  std::string out;
  for (const char raw : text) {
    const auto c = static_cast<unsigned char>(raw);
    if (std::isalnum(c) || c == '_' || c == '-' || c == '.' || c == '~') {
      out.push_back(static_cast<char>(c));
    } else {
      out += fmt::format("%{:02X}", c);
    }
  }
  return out;
}

}  // namespace

std::vector<Edge> parse_conceptnet_response(const Json& body) {
  std::vector<Edge> edges;
  if (!body.is_object() || !body.contains("edges") || !body["edges"].is_array()) {
    throw Error(ErrorKind::schema, "ConceptNet response has no 'edges' array", "edges");
  }
  for (const auto& e : body["edges"]) {
    if (!e.is_object() || !e.contains("start") || !e.contains("end") || !e.contains("rel")) continue;
    const auto& start = e["start"];
    const auto& end = e["end"];
    const auto start_term = start.value("term", start.value("@id", std::string{}));
    const auto end_term = end.value("term", end.value("@id", std::string{}));
    const auto lemma = term_lemma(start_term);
    if (lemma.empty() || end_term.rfind("/c/en/", 0) != 0) continue;

    Edge edge;
    edge.start = lemma;
    edge.relation = e["rel"].value("label", std::string{});
    if (edge.relation.empty()) {
      const auto rel_id = e["rel"].value("@id", std::string{});
      edge.relation = rel_id.rfind("/r/", 0) == 0 ? rel_id.substr(3) : rel_id;
    }
    edge.end = end.value("label", term_lemma(end_term));
    edge.weight = e.value("weight", 1.0);
    edge.source = from_wordnet(e) ? EdgeSource::wordnet : EdgeSource::crowd;
    edges.push_back(std::move(edge));
  }
  return edges;
}

ConceptNetClient::ConceptNetClient(ConceptNetConfig config) : config_(std::move(config)) {}

std::filesystem::path ConceptNetClient::cache_file(std::string_view lemma) const {
  return config_.cache_dir / fmt::format("conceptnet-usedfor-{}.json", normalize_label(lemma));
}

std::vector<Edge> ConceptNetClient::usedfor_edges(std::string_view lemma) {
  const auto term = normalize_label(lemma);
  if (!config_.cache_dir.empty() && std::filesystem::exists(cache_file(term))) {
    return load_fixture(cache_file(term)).conceptnet_edges;
  }

  const auto gate = gate_for(config_.base_url);
  httplib::Result response;
  {
    std::unique_lock lock(gate->mutex);
    if (gate->used) {
      const auto ready = gate->last + config_.min_interval;
      std::this_thread::sleep_until(ready);
    }
    httplib::Client client(config_.base_url);
    client.set_connection_timeout(config_.timeout);
    client.set_read_timeout(config_.timeout);
    client.set_follow_location(true);
    const auto path =
        fmt::format("/query?start=/c/en/{}&rel=/r/UsedFor&limit={}", url_encode(term), config_.limit);
    response = client.Get(path);
    gate->last = std::chrono::steady_clock::now();
    gate->used = true;
    ++network_requests_;
  }
  if (!response) {
    throw Error(ErrorKind::not_found,
                fmt::format("ConceptNet request for '{}' failed: {}", term, httplib::to_string(response.error())));
  }
  if (response->status != 200) {
    throw Error(ErrorKind::not_found, fmt::format("ConceptNet returned HTTP {} for '{}'", response->status, term));
  }
  auto edges = parse_conceptnet_response(parse_json(response->body, "ConceptNet response"));
  edges.erase(std::remove_if(edges.begin(), edges.end(),
                             [&](const Edge& e) { return e.relation != "UsedFor" || normalize_label(e.start) != term; }),
              edges.end());

  if (!config_.cache_dir.empty()) {
    KnowledgeFixture cached;
    cached.conceptnet_edges = edges;
    Json doc = to_json(cached);
    if (!doc.contains("conceptnet_edges")) doc["conceptnet_edges"] = Json::array();
    write_text_file(cache_file(term), dump_json(doc));
  }
  return edges;
}

KnowledgeFixture with_live_edges(const KnowledgeFixture& base, std::string_view label, ConceptNetClient& client) {
  KnowledgeFixture extended = base;
  std::vector<std::string> lemmas{normalize_label(label)};
  try {
    for (auto& lemma : synset_lemmas(select_synset(label, base), base)) {
      if (std::find(lemmas.begin(), lemmas.end(), lemma) == lemmas.end()) lemmas.push_back(lemma);
    }
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::not_found) throw;
  }
  KnowledgeFixture live;
  for (const auto& lemma : lemmas) {
    for (auto& edge : client.usedfor_edges(lemma)) live.conceptnet_edges.push_back(std::move(edge));
  }
  merge_fixture(extended, live);
  return extended;
}

}  // namespace muw::knowledge
