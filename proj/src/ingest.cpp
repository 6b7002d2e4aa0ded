#include "pestpulse/ingest.hpp"

#include <algorithm>
#include <array>

#include "pestpulse/csv.hpp"
#include "pestpulse/errors.hpp"
#include "pestpulse/text.hpp"

namespace pestpulse::ingest {

Season parse_season(std::string_view text) {
  std::string s = normalize_text(text);
  if (s == "rabi") return Season::Rabi;
  if (s == "kharif") return Season::Kharif;
  if (s == "zaid") return Season::Zaid;
  return Season::Unknown;
}

std::string season_name(Season s) {
  switch (s) {
    case Season::Rabi: return "RABI";
    case Season::Kharif: return "KHARIF";
    case Season::Zaid: return "ZAID";
    case Season::Unknown: return "UNKNOWN";
  }
  return "UNKNOWN";
}

std::pair<std::vector<KccRecord>, IngestReport> parse_records(
    std::istream& csv_stream, const IngestConfig& config) {
  CsvReader reader(csv_stream);
  std::vector<std::string> fields;
  std::string error;

  auto status = reader.next(fields, error);
  if (status == CsvReader::RowStatus::Eof)
    throw DataError("ingest: input is empty, expected a header row");
  if (status == CsvReader::RowStatus::Malformed)
    throw DataError("ingest: unreadable header row: " + error);

  const auto& logical = default_columns();
  std::array<std::size_t, 11> index{};
  for (std::size_t i = 0; i < logical.size(); ++i) {
    const std::string wanted = config.header_for(logical[i]);
    auto it = std::find_if(fields.begin(), fields.end(), [&](const auto& h) {
      return trim(h) == wanted;
    });
    if (it == fields.end())
      throw DataError("ingest: header is missing column '" + wanted +
                      "' (for " + logical[i] + ")");
    index[i] = static_cast<std::size_t>(it - fields.begin());
  }
  const std::size_t expected_width = fields.size();

  std::vector<KccRecord> records;
  IngestReport report;

  while (true) {
    status = reader.next(fields, error);
    if (status == CsvReader::RowStatus::Eof) break;
    ++report.total_rows;
    if (status == CsvReader::RowStatus::Malformed ||
        fields.size() != expected_width) {
      ++report.rejected_malformed_row;
      continue;
    }

    auto field = [&](std::size_t logical_idx) -> const std::string& {
      return fields[index[logical_idx]];
    };

    const std::string state = canonical_region(field(7));
    const std::string district = canonical_region(field(8));
    const std::string created_raw = trim(field(10));
    if (state.empty() || district.empty() || created_raw.empty()) {
      ++report.rejected_missing_field;
      continue;
    }

    auto created = parse_timestamp(created_raw);
    if (!created) {
      ++report.rejected_bad_timestamp;
      continue;
    }
    if (created->date < config.date_from || created->date > config.date_to) {
      ++report.rejected_out_of_window;
      continue;
    }

    KccRecord rec;
    rec.season = parse_season(field(0));
    rec.sector = field(1);
    rec.category = field(2);
    rec.crop = field(3);
    rec.query_type = field(4);
    rec.query_text = field(5);
    rec.answer_text = field(6);
    rec.state = state;
    rec.district = district;
    rec.block = canonical_region(field(9));
    rec.created_on = *created;
    records.push_back(std::move(rec));
    ++report.accepted;
  }

  return {std::move(records), report};
}

std::vector<KccRecord> clean(const std::vector<KccRecord>& records) {
  std::vector<KccRecord> kept;
  kept.reserve(records.size());
  for (const auto& rec : records) {
    if (trim(rec.state).empty() || trim(rec.district).empty()) continue;
    kept.push_back(rec);
  }
  return kept;
}

TextPreprocessor identity_preprocessor() {
  return [](const std::string& text) { return text; };
}

TextPreprocessor normalize_preprocessor() {
  return [](const std::string& text) { return normalize_text(text); };
}

KccRecord preprocess_text(const KccRecord& record,
                          const TextPreprocessor& preprocessor, bool* failed) {
  if (failed) *failed = false;
  try {
    KccRecord out = record;
    out.query_text = preprocessor(record.query_text);
    out.answer_text = preprocessor(record.answer_text);
    return out;
  } catch (...) {
    if (failed) *failed = true;
    return record;
  }
}

std::vector<KccRecord> preprocess_corpus(std::vector<KccRecord> records,
                                         const TextPreprocessor& preprocessor,
                                         IngestReport& report) {
  for (auto& rec : records) {
    bool failed = false;
    rec = preprocess_text(rec, preprocessor, &failed);
    if (failed) ++report.preprocessor_failures;
  }
  return records;
}

void write_records_csv(std::ostream& out,
                       const std::vector<KccRecord>& records,
                       const IngestConfig& config) {
  const auto& logical = default_columns();
  std::vector<std::string> row;
  row.reserve(logical.size());
  for (const auto& name : logical) row.push_back(config.header_for(name));
  write_csv_row(out, row);

  for (const auto& rec : records) {
    row.clear();
    row.push_back(season_name(rec.season));
    row.push_back(rec.sector);
    row.push_back(rec.category);
    row.push_back(rec.crop);
    row.push_back(rec.query_type);
    row.push_back(rec.query_text);
    row.push_back(rec.answer_text);
    row.push_back(rec.state);
    row.push_back(rec.district);
    row.push_back(rec.block);
    row.push_back(format_timestamp(rec.created_on));
    write_csv_row(out, row);
  }
}

}  // namespace pestpulse::ingest
