#ifndef PESTPULSE_AGGREGATE_HPP
#define PESTPULSE_AGGREGATE_HPP

#include <istream>
#include <map>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "pestpulse/dates.hpp"
#include "pestpulse/lexicon.hpp"

namespace pestpulse::agg {

enum class RegionLevel { National, State, District, Block };

std::string region_level_name(RegionLevel level);
RegionLevel parse_region_level(std::string_view text);

// region_name is empty exactly when level is National; pest_id empty means
// all pests.
struct SeriesKey {
  RegionLevel level = RegionLevel::National;
  std::string region_name;
  std::string pest_id;

  bool operator==(const SeriesKey&) const = default;
};

enum class Bin { Daily, Monthly };

std::string bin_name(Bin bin);
Bin parse_bin(std::string_view text);

struct DateWindow {
  Date from{2015, 1, 1};
  Date to{2020, 12, 31};
};

// Calendar-binned counts with zeros filled over the whole window so every
// series sharing a window is alignable.
struct FrequencySeries {
  SeriesKey key;
  Bin bin = Bin::Daily;
  Date start;
  std::vector<double> values;
  bool normalized = false;
  std::string unit = "queries";

  Date date_at(std::size_t index) const;
  double total() const;
};

// Gross cropped area rows keyed by (state, district, year), hectares.
class AreaTable {
 public:
  static AreaTable load_csv(std::istream& in);

  void add(const std::string& state, const std::string& district, int year,
           double gca_ha);

  // Area for a state or district in a calendar year; state area sums its
  // districts. A missing year falls back to the nearest year within +/-2
  // (noted in `warnings`); otherwise throws DataError naming the pair.
  double area_for(RegionLevel level, const std::string& region, int year,
                  std::vector<std::string>* warnings = nullptr) const;

  std::vector<std::string> regions(RegionLevel level) const;
  bool empty() const { return rows_.empty(); }

 private:
  std::map<std::tuple<std::string, std::string, int>, double> rows_;
};

bool record_matches_key(const lexicon::LabelledRecord& rec,
                        const SeriesKey& key);

// Count of matching records per calendar bin; zero-filled; deterministic
// and permutation-invariant. threads <= 0 uses the OpenMP default.
FrequencySeries build_series(std::span<const lexicon::LabelledRecord> labelled,
                             const SeriesKey& key, Bin bin,
                             const DateWindow& window, int threads = 0);

// Serial reference used by tests and the benchmark.
FrequencySeries build_series_serial(
    std::span<const lexicon::LabelledRecord> labelled, const SeriesKey& key,
    Bin bin, const DateWindow& window);

// Each bin divided by the region's area for that bin's calendar year,
// reported as queries per 1000 ha. District or state level only.
FrequencySeries normalize_by_area(const FrequencySeries& series,
                                  const AreaTable& areas,
                                  std::vector<std::string>* warnings = nullptr);

// Entry m-1 sums the values of bins falling in calendar month m.
std::array<double, 12> monthly_profile(const FrequencySeries& series);

struct RegionValue {
  std::string region;
  double value;
};

// One row per region with cultivated area, zero-query regions included,
// sorted descending by normalized value (ties by name).
std::vector<RegionValue> choropleth_export(
    std::span<const lexicon::LabelledRecord> labelled,
    const std::string& pest_id, const DateWindow& period, RegionLevel level,
    const AreaTable& areas, std::vector<std::string>* warnings = nullptr);

}  // namespace pestpulse::agg

#endif  // PESTPULSE_AGGREGATE_HPP
