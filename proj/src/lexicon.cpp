#include "pestpulse/lexicon.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <json.hpp>

#include "pestpulse/errors.hpp"
#include "pestpulse/text.hpp"

namespace pestpulse::lexicon {

PestLexicon PestLexicon::from_entries(std::vector<PestEntry> entries) {
  std::map<std::string, std::string> owner;  // name -> pest_id
  std::map<std::string, bool> seen_ids;

  PestLexicon lex;
  for (auto& entry : entries) {
    if (entry.id.empty())
      throw ValidationError("lexicon: entry with empty id");
    if (seen_ids.count(entry.id))
      throw ValidationError("lexicon: duplicate pest id '" + entry.id + "'");
    seen_ids[entry.id] = true;

    std::vector<std::string> names;
    names.push_back(entry.canonical_name);
    names.insert(names.end(), entry.aliases.begin(), entry.aliases.end());
    for (const auto& name : names) {
      if (name.empty())
        throw ValidationError("lexicon: empty name under id '" + entry.id +
                              "'");
      if (normalize_text(name) != name)
        throw ValidationError("lexicon: name '" + name + "' under id '" +
                              entry.id +
                              "' is not in normalized form "
                              "(lowercase tokens, single spaces)");
      int tokens = static_cast<int>(split_tokens(name).size());
      if (tokens < 1 || tokens > 4)
        throw ValidationError("lexicon: name '" + name +
                              "' must be 1..4 tokens");
      auto it = owner.find(name);
      if (it != owner.end() && it->second != entry.id)
        throw ValidationError("lexicon: name '" + name +
                              "' appears under both '" + it->second +
                              "' and '" + entry.id + "'");
      owner[name] = entry.id;
    }
  }

  lex.entries_ = std::move(entries);
  for (std::size_t i = 0; i < lex.entries_.size(); ++i) {
    const auto& entry = lex.entries_[i];
    auto push_name = [&](const std::string& name) {
      // Skip duplicates within one entry (canonical repeated as alias).
      for (const auto& existing : lex.names_)
        if (existing.entry_index == i && existing.text == name) return;
      int tokens = static_cast<int>(split_tokens(name).size());
      lex.names_.push_back({i, name, tokens});
      lex.max_name_tokens_ = std::max(lex.max_name_tokens_, tokens);
    };
    push_name(entry.canonical_name);
    for (const auto& alias : entry.aliases) push_name(alias);
  }
  return lex;
}

PestLexicon PestLexicon::parse_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("lexicon: invalid JSON: ") + e.what());
  }
  if (!doc.is_array())
    throw ValidationError("lexicon: expected a top-level JSON array");
  std::vector<PestEntry> entries;
  for (const auto& item : doc) {
    PestEntry entry;
    entry.id = item.value("id", "");
    entry.canonical_name = item.value("name", "");
    if (item.contains("aliases"))
      for (const auto& alias : item.at("aliases"))
        entry.aliases.push_back(alias.get<std::string>());
    entries.push_back(std::move(entry));
  }
  return from_entries(std::move(entries));
}

PestLexicon PestLexicon::parse_tsv(const std::string& text) {
  std::vector<PestEntry> entries;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || line[0] == '#') continue;
    std::vector<std::string> cols;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      std::size_t tab = line.find('\t', pos);
      if (tab == std::string::npos) tab = line.size();
      cols.push_back(line.substr(pos, tab - pos));
      pos = tab + 1;
    }
    if (cols.size() < 2)
      throw ValidationError("lexicon: TSV line needs at least id and name: " +
                            line);
    PestEntry entry;
    entry.id = trim(cols[0]);
    entry.canonical_name = trim(cols[1]);
    if (cols.size() >= 3) {
      std::size_t p = 0;
      const std::string& aliases = cols[2];
      while (p <= aliases.size()) {
        std::size_t bar = aliases.find('|', p);
        if (bar == std::string::npos) bar = aliases.size();
        std::string alias = trim(aliases.substr(p, bar - p));
        if (!alias.empty()) entry.aliases.push_back(alias);
        p = bar + 1;
      }
    }
    entries.push_back(std::move(entry));
  }
  return from_entries(std::move(entries));
}

PestLexicon PestLexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("lexicon: cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (path.extension() == ".json") return parse_json(buffer.str());
  return parse_tsv(buffer.str());
}

std::string label_source_name(LabelSource s) {
  return s == LabelSource::Question ? "question" : "answer";
}

namespace {

char lower(char c) {
  return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
}

bool equal_ci(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (lower(a[i]) != lower(b[i])) return false;
  return true;
}

// Distance-1 check for equal-length strings: one substitution or one
// adjacent transposition.
bool within_one_same_length(std::string_view a, std::string_view b) {
  std::size_t i = 0;
  const std::size_t n = a.size();
  while (i < n && lower(a[i]) == lower(b[i])) ++i;
  if (i == n) return true;
  std::size_t j = n;
  while (j > i && lower(a[j - 1]) == lower(b[j - 1])) --j;
  // Mismatched core is a[i..j).
  if (j - i == 1) return true;  // single substitution
  if (j - i == 2)
    return lower(a[i]) == lower(b[i + 1]) && lower(a[i + 1]) == lower(b[i]);
  return false;
}

// Distance-1 check when a is one char longer than b: one deletion from a.
bool within_one_deletion(std::string_view a, std::string_view b) {
  std::size_t i = 0;
  while (i < b.size() && lower(a[i]) == lower(b[i])) ++i;
  // Drop a[i]; the remainder must match exactly.
  for (std::size_t k = i; k < b.size(); ++k)
    if (lower(a[k + 1]) != lower(b[k])) return false;
  return true;
}

}  // namespace

std::optional<int> match_distance(std::string_view candidate,
                                  std::string_view name) {
  const std::size_t la = candidate.size();
  const std::size_t lb = name.size();
  if (la == lb) {
    if (equal_ci(candidate, name)) return 0;
    if (within_one_same_length(candidate, name)) return 1;
    return std::nullopt;
  }
  if (la + 1 == lb) {
    if (within_one_deletion(name, candidate)) return 1;
    return std::nullopt;
  }
  if (lb + 1 == la) {
    if (within_one_deletion(candidate, name)) return 1;
    return std::nullopt;
  }
  return std::nullopt;
}

namespace {

struct Candidate {
  int distance;
  int source_rank;
  std::size_t position;
  std::size_t name_rank;
  std::string matched_text;

  bool better_than(const Candidate& other) const {
    if (distance != other.distance) return distance < other.distance;
    if (source_rank != other.source_rank)
      return source_rank < other.source_rank;
    if (position != other.position) return position < other.position;
    return name_rank < other.name_rank;
  }
};

void scan_field(const std::string& raw_text, int source_rank,
                const PestLexicon& lexicon, std::optional<Candidate>& best) {
  const std::string text = normalize_text(raw_text);
  const std::vector<std::string> tokens = split_tokens(text);
  if (tokens.empty()) return;

  // windows[w-1][pos] = tokens[pos..pos+w) joined by single spaces.
  const std::size_t max_width = std::min<std::size_t>(
      static_cast<std::size_t>(lexicon.max_name_tokens()), tokens.size());
  std::vector<std::vector<std::string>> windows(max_width);
  for (std::size_t w = 1; w <= max_width; ++w) {
    auto& row = windows[w - 1];
    row.reserve(tokens.size() - w + 1);
    for (std::size_t pos = 0; pos + w <= tokens.size(); ++pos) {
      if (w == 1) {
        row.push_back(tokens[pos]);
      } else {
        row.push_back(windows[w - 2][pos] + ' ' + tokens[pos + w - 1]);
      }
    }
  }

  for (std::size_t name_rank = 0; name_rank < lexicon.names().size();
       ++name_rank) {
    const auto& name = lexicon.names()[name_rank];
    const std::size_t width = static_cast<std::size_t>(name.token_count);
    if (width > max_width) continue;
    const auto& row = windows[width - 1];
    for (std::size_t pos = 0; pos < row.size(); ++pos) {
      auto dist = match_distance(row[pos], name.text);
      if (!dist) continue;
      // Short names are too noisy for fuzzy matching; require exact.
      if (name.text.size() < 4 && *dist != 0) continue;
      Candidate cand{*dist, source_rank, pos, name_rank, row[pos]};
      if (!best || cand.better_than(*best)) best = cand;
    }
  }
}

}  // namespace

std::optional<PestLabel> label_query(const ingest::KccRecord& record,
                                     const PestLexicon& lexicon) {
  if (lexicon.names().empty()) return std::nullopt;
  std::optional<Candidate> best;
  scan_field(record.query_text, 0, lexicon, best);
  scan_field(record.answer_text, 1, lexicon, best);
  if (!best) return std::nullopt;
  PestLabel label;
  label.pest_id = lexicon.entries()[lexicon.names()[best->name_rank].entry_index].id;
  label.matched_text = best->matched_text;
  label.source =
      best->source_rank == 0 ? LabelSource::Question : LabelSource::Answer;
  label.distance = best->distance;
  return label;
}

std::pair<std::vector<LabelledRecord>, LabelStats> label_corpus_serial(
    const std::vector<ingest::KccRecord>& records,
    const PestLexicon& lexicon) {
  std::vector<LabelledRecord> out;
  LabelStats stats;
  stats.total = records.size();
  for (const auto& rec : records) {
    if (auto label = label_query(rec, lexicon))
      out.emplace_back(rec, std::move(*label));
  }
  stats.labelled = out.size();
  return {std::move(out), stats};
}

std::pair<std::vector<LabelledRecord>, LabelStats> label_corpus(
    const std::vector<ingest::KccRecord>& records, const PestLexicon& lexicon,
    int threads) {
  const std::size_t n = records.size();
  LabelStats stats;
  stats.total = n;

#ifdef _OPENMP
  // Per-record labels computed in parallel, then compacted in input order
  // so the result is identical for any shard count.
  std::vector<std::optional<PestLabel>> labels(n);
  int num_threads = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(num_threads)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i)
    labels[static_cast<std::size_t>(i)] =
        label_query(records[static_cast<std::size_t>(i)], lexicon);

  std::vector<LabelledRecord> out;
  for (std::size_t i = 0; i < n; ++i)
    if (labels[i]) out.emplace_back(records[i], std::move(*labels[i]));
  stats.labelled = out.size();
  return {std::move(out), stats};
#else
  (void)threads;
  return label_corpus_serial(records, lexicon);
#endif
}

}  // namespace pestpulse::lexicon
