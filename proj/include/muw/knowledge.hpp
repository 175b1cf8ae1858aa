#pragma once

// Utilisation knowledge extraction. For an artefact label:
//   1. pick the artefact-noun synset with the most frequent member lemmas,
//   2. collect its synonym lemmas,
//   3. mine UsedFor edges (lexical-database-sourced first, then reliable
//      crowdsourced edges, then the stemmed label as a verb),
//   4. keep verbs with a physical reading (contact, change, motion),
//   5. set each utilisation dimension to 1 iff the kept verb synsets meet
//      that dimension's reference synsets.
// Edge weights of the winning stage are grouped by head verb and passed
// through a softmax to give membership evidence.

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "muw/json_io.hpp"

namespace muw::knowledge {

struct SynsetEntry {
  std::string id;
  std::string pos;      ///< "n" or "v"
  std::string lexname;  ///< e.g. "noun.artifact", "verb.contact"
  double count = 0.0;   ///< corpus frequency of the indexing lemma in this synset
  std::vector<std::string> lemmas;

  bool operator==(const SynsetEntry&) const = default;
};

enum class EdgeSource { wordnet, crowd };

struct Edge {
  std::string start;
  std::string relation;
  std::string end;
  double weight = 1.0;
  EdgeSource source = EdgeSource::crowd;

  bool operator==(const Edge&) const = default;
};

struct KnowledgeFixture {
  /// lemma -> synsets containing it
  std::map<std::string, std::vector<SynsetEntry>> wordnet;
  std::vector<Edge> conceptnet_edges;
  /// utilisation dimension -> reference verb synset ids
  std::map<std::string, std::vector<std::string>> utilisation_refs;

  bool operator==(const KnowledgeFixture&) const = default;
};

enum class Provenance { wordnet_edge, crowd_edge, stem_fallback, none };

std::string_view to_string(Provenance provenance) noexcept;
std::string_view to_string(EdgeSource source) noexcept;

struct PipelineConfig {
  std::vector<std::string> physical_lexnames{"verb.contact", "verb.change", "verb.motion"};
  /// Crowd edges at or below this weight are treated as noise.
  double crowd_weight_threshold = 1.0;
};

struct MinedVerbs {
  std::vector<std::string> verbs;
  Provenance provenance = Provenance::none;
  /// Edges that yielded a verb, paired with that verb.
  std::vector<std::pair<Edge, std::string>> sources;
};

struct DimensionEvidence {
  std::vector<std::string> verbs;
  double mu = 0.0;

  bool operator==(const DimensionEvidence&) const = default;
};

struct UtilisationGrounding {
  std::string label;
  std::optional<std::string> synset;
  std::map<std::string, int> dims;
  std::map<std::string, DimensionEvidence> evidence;
  /// Softmax over head-verb groups; sums to 1 unless empty.
  std::map<std::string, double> groups;
  std::vector<std::string> verbs;
  Provenance provenance = Provenance::none;

  bool operator==(const UtilisationGrounding&) const = default;
};

/// Lowercased, trimmed, inner whitespace turned into '_' (ConceptNet term style).
std::string normalize_label(std::string_view label);

bool has_verb_reading(std::string_view lemma, const KnowledgeFixture& fixture);

/// Inflection-stripping candidates for a token, most literal first.
std::vector<std::string> lemma_candidates(std::string_view token);

/// First token of the phrase that lemmatizes to a known verb.
std::optional<std::string> extract_verb(std::string_view phrase, const KnowledgeFixture& fixture);

/// Throws not_found when the label has no artefact-noun synset.
std::string select_synset(std::string_view label, const KnowledgeFixture& fixture);

/// Member lemmas of a synset as recorded in the fixture.
std::vector<std::string> synset_lemmas(std::string_view synset_id, const KnowledgeFixture& fixture);

/// One mining stage: UsedFor edges of the given source starting at any of the lemmas.
MinedVerbs mine_stage(std::span<const std::string> lemmas, EdgeSource source, const KnowledgeFixture& fixture,
                      const PipelineConfig& config = {});

/// Lexical-database edges first; reliable crowd edges only if those yield nothing.
MinedVerbs mine_usedfor(std::span<const std::string> lemmas, const KnowledgeFixture& fixture,
                        const PipelineConfig& config = {});

std::optional<std::string> stem_fallback(std::string_view label, const KnowledgeFixture& fixture);

std::vector<std::string> filter_physical(std::span<const std::string> verbs, const KnowledgeFixture& fixture,
                                         const PipelineConfig& config = {});

UtilisationGrounding ground_utilisation(std::string_view label, std::span<const std::string> target_dims,
                                        const KnowledgeFixture& fixture, const PipelineConfig& config = {});

/// exp(w_k) / sum_j exp(w_j), temperature 1. Keys must be distinct.
std::map<std::string, double> softmax_grounding(std::span<const std::pair<std::string, double>> entries);

/// Sums edge weights per head verb.
std::vector<std::pair<std::string, double>> group_by_verb(std::span<const std::pair<Edge, std::string>> sources);

inline const std::vector<std::string>& default_utilisation_dims() {
  static const std::vector<std::string> dims{"drill", "hammer", "lift", "rivet"};
  return dims;
}

Json to_json(const KnowledgeFixture& fixture);
KnowledgeFixture fixture_from_json(const Json& node, const std::string& path = "");
/// Appends synsets, edges and references of `extra` that are not yet present.
void merge_fixture(KnowledgeFixture& into, const KnowledgeFixture& extra);
/// Merges every *.json file of the directory (sorted by name), or loads a single file.
KnowledgeFixture load_fixture(const std::filesystem::path& path);

Json to_json(const UtilisationGrounding& grounding);

}  // namespace muw::knowledge
