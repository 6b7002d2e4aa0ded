#ifndef PESTPULSE_TESTS_SUPPORT_HPP
#define PESTPULSE_TESTS_SUPPORT_HPP

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pestpulse/dates.hpp"
#include "pestpulse/ingest.hpp"
#include "pestpulse/lexicon.hpp"

namespace testsupport {

// Quadratic dynamic-programming Damerau-Levenshtein distance (optimal string
// alignment: substitution, insertion, deletion, adjacent transposition).
// Independent oracle for the bounded matcher.
inline std::size_t dl_distance_oracle(std::string_view a, std::string_view b) {
  auto lower = [](char c) {
    return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  };
  const std::size_t n = a.size(), m = b.size();
  std::vector<std::vector<std::size_t>> d(n + 1,
                                          std::vector<std::size_t>(m + 1, 0));
  for (std::size_t i = 0; i <= n; ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= m; ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t cost = lower(a[i - 1]) == lower(b[j - 1]) ? 0 : 1;
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1,
                          d[i - 1][j - 1] + cost});
      if (i > 1 && j > 1 && lower(a[i - 1]) == lower(b[j - 2]) &&
          lower(a[i - 2]) == lower(b[j - 1]))
        d[i][j] = std::min(d[i][j], d[i - 2][j - 2] + 1);
    }
  }
  return d[n][m];
}

// O(n*k) double-loop autocorrelation oracle.
inline std::vector<double> acf_oracle(const std::vector<double>& y,
                                      int max_lag) {
  const std::size_t n = y.size();
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(n);
  double denom = 0.0;
  for (double v : y) denom += (v - mean) * (v - mean);
  std::vector<double> r(static_cast<std::size_t>(max_lag) + 1, 0.0);
  for (int k = 0; k <= max_lag; ++k) {
    double num = 0.0;
    for (std::size_t t = 0; t + static_cast<std::size_t>(k) < n; ++t)
      num += (y[t] - mean) * (y[t + static_cast<std::size_t>(k)] - mean);
    r[static_cast<std::size_t>(k)] = num / denom;
  }
  return r;
}

inline pestpulse::ingest::KccRecord make_record(
    const std::string& query, const std::string& answer = "",
    const std::string& state = "PUNJAB",
    const std::string& district = "LUDHIANA",
    pestpulse::Date date = {2016, 6, 15}) {
  pestpulse::ingest::KccRecord rec;
  rec.season = pestpulse::ingest::Season::Kharif;
  rec.sector = "AGRICULTURE";
  rec.category = "Field Crops";
  rec.crop = "Wheat";
  rec.query_type = "Plant Protection";
  rec.query_text = query;
  rec.answer_text = answer;
  rec.state = state;
  rec.district = district;
  rec.block = "BLOCK A";
  rec.created_on = {date, 10, 30, 0, 0};
  return rec;
}

// Brute-force (region, pest, bin) -> count oracle over labelled records,
// independent of the aggregation module's binning.
inline std::map<std::string, double> monthly_group_by_oracle(
    const std::vector<pestpulse::lexicon::LabelledRecord>& labelled) {
  std::map<std::string, double> counts;
  for (const auto& [rec, label] : labelled) {
    char key[16];
    std::snprintf(key, sizeof(key), "%04d-%02d", rec.created_on.date.year,
                  rec.created_on.date.month);
    counts[key] += 1.0;
  }
  return counts;
}

inline std::filesystem::path data_dir() {
  return std::filesystem::path(PESTPULSE_DATA_DIR);
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("pestpulse_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void spit(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  out << content;
}

}  // namespace testsupport

#endif  // PESTPULSE_TESTS_SUPPORT_HPP
