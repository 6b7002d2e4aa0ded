#ifndef PESTPULSE_LEXICON_HPP
#define PESTPULSE_LEXICON_HPP

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pestpulse/ingest.hpp"

namespace pestpulse::lexicon {

struct PestEntry {
  std::string id;
  std::string canonical_name;
  std::vector<std::string> aliases;
};

// Immutable after construction; safe to share across threads.
class PestLexicon {
 public:
  PestLexicon() = default;

  // Validates entries: unique ids, no name/alias shared between ids, every
  // name normalizer-stable and 1..4 tokens. Throws ValidationError.
  static PestLexicon from_entries(std::vector<PestEntry> entries);

  // JSON array of {"id","name","aliases"} or TSV (id, name, alias|alias).
  // Format picked by file extension (.json vs anything else).
  static PestLexicon load(const std::filesystem::path& path);
  static PestLexicon parse_json(const std::string& text);
  static PestLexicon parse_tsv(const std::string& text);

  const std::vector<PestEntry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

  // Flattened names in match-precedence order (entry order, canonical
  // before aliases).
  struct NameRef {
    std::size_t entry_index;
    std::string text;
    int token_count;
  };
  const std::vector<NameRef>& names() const { return names_; }
  int max_name_tokens() const { return max_name_tokens_; }

 private:
  std::vector<PestEntry> entries_;
  std::vector<NameRef> names_;
  int max_name_tokens_ = 0;
};

enum class LabelSource { Question, Answer };

std::string label_source_name(LabelSource s);

struct PestLabel {
  std::string pest_id;
  std::string matched_text;
  LabelSource source = LabelSource::Question;
  int distance = 0;

  bool operator==(const PestLabel&) const = default;
};

// Damerau-Levenshtein distance (substitution, insertion, deletion, adjacent
// transposition) when it is <= 1, otherwise nullopt. Case-insensitive.
std::optional<int> match_distance(std::string_view candidate,
                                  std::string_view name);

// Scans question tokens then answer tokens against every lexicon name over
// sliding token windows. Best match by (distance, source, position, lexicon
// order). Names shorter than 4 characters only match exactly.
std::optional<PestLabel> label_query(const ingest::KccRecord& record,
                                     const PestLexicon& lexicon);

struct LabelStats {
  std::size_t labelled = 0;
  std::size_t total = 0;

  double fraction() const {
    return total == 0 ? 0.0
                      : static_cast<double>(labelled) /
                            static_cast<double>(total);
  }
};

using LabelledRecord = std::pair<ingest::KccRecord, PestLabel>;

// Labels a corpus, preserving input order among labelled records.
// threads <= 0 uses the OpenMP default.
std::pair<std::vector<LabelledRecord>, LabelStats> label_corpus(
    const std::vector<ingest::KccRecord>& records, const PestLexicon& lexicon,
    int threads = 0);

// Serial reference used by tests and the benchmark.
std::pair<std::vector<LabelledRecord>, LabelStats> label_corpus_serial(
    const std::vector<ingest::KccRecord>& records, const PestLexicon& lexicon);

}  // namespace pestpulse::lexicon

#endif  // PESTPULSE_LEXICON_HPP
