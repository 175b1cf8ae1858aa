#pragma once

// Readers for live knowledge: WordNet database files on disk and the
// ConceptNet REST API. Both produce fixture-format data, so the pipeline
// itself only ever sees a KnowledgeFixture.

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "muw/knowledge.hpp"

namespace muw::knowledge {

/// Lexicographer file name for a WordNet lex_filenum (e.g. 35 -> "verb.contact").
std::string_view lexname_for(int lex_filenum);

/// Parses one line of a WordNet data.noun / data.verb file. Returns false for licence/header lines.
bool parse_wordnet_data_line(std::string_view line, const std::vector<std::string>& lexnames, std::string& synset_id,
                             SynsetEntry& entry);

/// Reads data.noun, data.verb and (if present) lexnames and cntlist.rev from a WordNet dict directory.
KnowledgeFixture read_wordnet_database(const std::filesystem::path& dict_dir);

struct ConceptNetConfig {
  std::string base_url = "https://api.conceptnet.io";
  /// Write-through cache; responses are stored as fixture-format files.
  std::filesystem::path cache_dir;
  std::chrono::milliseconds min_interval{500};
  std::chrono::seconds timeout{20};
  int limit = 1000;
};

/// Extracts English edges from a ConceptNet /query or /c response body.
std::vector<Edge> parse_conceptnet_response(const Json& body);

class ConceptNetClient {
 public:
  explicit ConceptNetClient(ConceptNetConfig config);

  /// UsedFor edges starting at the lemma; served from the cache when present.
  std::vector<Edge> usedfor_edges(std::string_view lemma);

  [[nodiscard]] std::size_t network_requests() const noexcept { return network_requests_; }

 private:
  [[nodiscard]] std::filesystem::path cache_file(std::string_view lemma) const;

  ConceptNetConfig config_;
  std::size_t network_requests_ = 0;
};

/// Copy of `base` extended with live UsedFor edges for the label and its synset lemmas.
KnowledgeFixture with_live_edges(const KnowledgeFixture& base, std::string_view label, ConceptNetClient& client);

}  // namespace muw::knowledge
