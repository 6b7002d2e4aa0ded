#ifndef PESTPULSE_INGEST_HPP
#define PESTPULSE_INGEST_HPP

#include <cstddef>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "pestpulse/dates.hpp"

namespace pestpulse::ingest {

enum class Season { Rabi, Kharif, Zaid, Unknown };

Season parse_season(std::string_view text);
std::string season_name(Season s);

// One cleaned call-center query. Region names are stored canonicalized
// (trimmed, uppercased) so they can be used directly as aggregation keys.
struct KccRecord {
  Season season = Season::Unknown;
  std::string sector;
  std::string category;
  std::string crop;
  std::string query_type;
  std::string query_text;
  std::string answer_text;
  std::string state;
  std::string district;
  std::string block;  // may be empty
  DateTime created_on;

  bool operator==(const KccRecord&) const = default;
};

struct IngestReport {
  std::size_t total_rows = 0;
  std::size_t accepted = 0;
  std::size_t rejected_missing_field = 0;
  std::size_t rejected_bad_timestamp = 0;
  std::size_t rejected_out_of_window = 0;
  std::size_t rejected_malformed_row = 0;
  std::size_t preprocessor_failures = 0;  // informational, not a rejection

  std::size_t rejected_total() const {
    return rejected_missing_field + rejected_bad_timestamp +
           rejected_out_of_window + rejected_malformed_row;
  }
};

// Logical column names and their default CSV headers coincide.
inline const std::vector<std::string>& default_columns() {
  static const std::vector<std::string> cols = {
      "Season",    "Sector",       "Category",  "Crop",
      "QueryType", "QueryText",    "KccAns",    "StateName",
      "DistrictName", "BlockName", "CreatedOn"};
  return cols;
}

struct IngestConfig {
  // Maps logical column name -> header name in the input file.
  std::map<std::string, std::string> column_map;
  Date date_from{2015, 1, 1};
  Date date_to{2020, 12, 31};

  std::string header_for(const std::string& logical) const {
    auto it = column_map.find(logical);
    return it == column_map.end() ? logical : it->second;
  }
};

// Parses a CSV dump. Rejected rows are counted by reason; a header missing
// any required column is fatal (DataError).
std::pair<std::vector<KccRecord>, IngestReport> parse_records(
    std::istream& csv_stream, const IngestConfig& config = {});

// Keeps records with non-empty state and district. Total, idempotent.
std::vector<KccRecord> clean(const std::vector<KccRecord>& records);

using TextPreprocessor = std::function<std::string(const std::string&)>;

TextPreprocessor identity_preprocessor();
TextPreprocessor normalize_preprocessor();

// Applies the preprocessor to query and answer text. A throwing preprocessor
// leaves the record unmodified; `failed` reports that.
KccRecord preprocess_text(const KccRecord& record,
                          const TextPreprocessor& preprocessor,
                          bool* failed = nullptr);

std::vector<KccRecord> preprocess_corpus(std::vector<KccRecord> records,
                                         const TextPreprocessor& preprocessor,
                                         IngestReport& report);

// Cleaned-records CSV with the same columns as the input schema.
void write_records_csv(std::ostream& out,
                       const std::vector<KccRecord>& records,
                       const IngestConfig& config = {});

}  // namespace pestpulse::ingest

#endif  // PESTPULSE_INGEST_HPP
