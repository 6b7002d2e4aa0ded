#include "pestpulse/aggregate.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "pestpulse/csv.hpp"
#include "pestpulse/errors.hpp"
#include "pestpulse/text.hpp"

namespace pestpulse::agg {

std::string region_level_name(RegionLevel level) {
  switch (level) {
    case RegionLevel::National: return "national";
    case RegionLevel::State: return "state";
    case RegionLevel::District: return "district";
    case RegionLevel::Block: return "block";
  }
  return "national";
}

RegionLevel parse_region_level(std::string_view text) {
  std::string s = normalize_text(text);
  if (s == "national") return RegionLevel::National;
  if (s == "state") return RegionLevel::State;
  if (s == "district") return RegionLevel::District;
  if (s == "block") return RegionLevel::Block;
  throw ValidationError("unknown region level '" + std::string(text) + "'");
}

std::string bin_name(Bin bin) {
  return bin == Bin::Daily ? "daily" : "monthly";
}

Bin parse_bin(std::string_view text) {
  std::string s = normalize_text(text);
  if (s == "daily") return Bin::Daily;
  if (s == "monthly") return Bin::Monthly;
  throw ValidationError("unknown bin '" + std::string(text) + "'");
}

Date FrequencySeries::date_at(std::size_t index) const {
  if (bin == Bin::Daily) return add_days(start, static_cast<std::int64_t>(index));
  return add_months(start, static_cast<int>(index));
}

double FrequencySeries::total() const {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum;
}

namespace {

std::size_t bin_count(Bin bin, const DateWindow& window) {
  if (window.to < window.from)
    throw ValidationError("date window end precedes start");
  if (bin == Bin::Daily)
    return static_cast<std::size_t>(serial_day(window.to) -
                                    serial_day(window.from)) +
           1;
  return static_cast<std::size_t>(months_between(window.from, window.to)) + 1;
}

// Bin index for a date, or -1 when outside the window.
std::int64_t bin_index(Bin bin, const DateWindow& window, const Date& d) {
  if (d < window.from || d > window.to) return -1;
  if (bin == Bin::Daily) return serial_day(d) - serial_day(window.from);
  return months_between(window.from, d);
}

Date window_start(Bin bin, const DateWindow& window) {
  if (bin == Bin::Monthly) return Date{window.from.year, window.from.month, 1};
  return window.from;
}

}  // namespace

bool record_matches_key(const lexicon::LabelledRecord& rec,
                        const SeriesKey& key) {
  if (!key.pest_id.empty() && rec.second.pest_id != key.pest_id) return false;
  switch (key.level) {
    case RegionLevel::National: return true;
    case RegionLevel::State: return rec.first.state == key.region_name;
    case RegionLevel::District: return rec.first.district == key.region_name;
    case RegionLevel::Block: return rec.first.block == key.region_name;
  }
  return false;
}

FrequencySeries build_series_serial(
    std::span<const lexicon::LabelledRecord> labelled, const SeriesKey& key,
    Bin bin, const DateWindow& window) {
  if (key.level == RegionLevel::National && !key.region_name.empty())
    throw ValidationError("national series must have an empty region name");
  if (key.level != RegionLevel::National && key.region_name.empty())
    throw ValidationError("region name required for " +
                          region_level_name(key.level) + " series");

  FrequencySeries series;
  series.key = key;
  series.bin = bin;
  series.start = window_start(bin, window);
  series.values.assign(bin_count(bin, window), 0.0);

  for (const auto& rec : labelled) {
    if (!record_matches_key(rec, key)) continue;
    std::int64_t idx = bin_index(bin, window, rec.first.created_on.date);
    if (idx < 0) continue;
    series.values[static_cast<std::size_t>(idx)] += 1.0;
  }
  return series;
}

FrequencySeries build_series(std::span<const lexicon::LabelledRecord> labelled,
                             const SeriesKey& key, Bin bin,
                             const DateWindow& window, int threads) {
#ifdef _OPENMP
  if (key.level == RegionLevel::National && !key.region_name.empty())
    throw ValidationError("national series must have an empty region name");
  if (key.level != RegionLevel::National && key.region_name.empty())
    throw ValidationError("region name required for " +
                          region_level_name(key.level) + " series");

  FrequencySeries series;
  series.key = key;
  series.bin = bin;
  series.start = window_start(bin, window);
  const std::size_t bins = bin_count(bin, window);
  series.values.assign(bins, 0.0);

  int num_threads = threads > 0 ? threads : omp_get_max_threads();
  const std::int64_t n = static_cast<std::int64_t>(labelled.size());

  // Partial counts per thread, merged by addition. Counts are integers so
  // the merge is exact and independent of the shard count.
#pragma omp parallel num_threads(num_threads)
  {
    std::vector<double> local(bins, 0.0);
#pragma omp for schedule(static) nowait
    for (std::int64_t i = 0; i < n; ++i) {
      const auto& rec = labelled[static_cast<std::size_t>(i)];
      if (!record_matches_key(rec, key)) continue;
      std::int64_t idx = bin_index(bin, window, rec.first.created_on.date);
      if (idx < 0) continue;
      local[static_cast<std::size_t>(idx)] += 1.0;
    }
#pragma omp critical
    for (std::size_t b = 0; b < bins; ++b) series.values[b] += local[b];
  }
  return series;
#else
  (void)threads;
  return build_series_serial(labelled, key, bin, window);
#endif
}

AreaTable AreaTable::load_csv(std::istream& in) {
  CsvReader reader(in);
  std::vector<std::string> fields;
  std::string error;

  auto status = reader.next(fields, error);
  if (status != CsvReader::RowStatus::Ok || fields.size() < 4)
    throw DataError("area table: expected header state,district,year,gca_ha");

  AreaTable table;
  std::size_t row_no = 1;
  while (true) {
    status = reader.next(fields, error);
    if (status == CsvReader::RowStatus::Eof) break;
    ++row_no;
    if (status != CsvReader::RowStatus::Ok || fields.size() < 4)
      throw DataError("area table: malformed row " + std::to_string(row_no));
    int year = 0;
    auto [p1, e1] = std::from_chars(fields[2].data(),
                                    fields[2].data() + fields[2].size(), year);
    double gca = 0.0;
    try {
      gca = std::stod(fields[3]);
    } catch (...) {
      e1 = std::errc::invalid_argument;
    }
    if (e1 != std::errc{})
      throw DataError("area table: bad year or area at row " +
                      std::to_string(row_no));
    table.add(fields[0], fields[1], year, gca);
  }
  return table;
}

void AreaTable::add(const std::string& state, const std::string& district,
                    int year, double gca_ha) {
  if (!(gca_ha > 0.0))
    throw DataError("area table: non-positive area for (" + state + ", " +
                    district + ", " + std::to_string(year) + ")");
  rows_[{canonical_region(state), canonical_region(district), year}] = gca_ha;
}

double AreaTable::area_for(RegionLevel level, const std::string& region,
                           int year,
                           std::vector<std::string>* warnings) const {
  auto sum_for_year = [&](int y) -> double {
    double sum = 0.0;
    for (const auto& [key, area] : rows_) {
      const auto& [state, district, row_year] = key;
      if (row_year != y) continue;
      if (level == RegionLevel::State && state == region) sum += area;
      if (level == RegionLevel::District && district == region) sum += area;
    }
    return sum;
  };

  if (level != RegionLevel::State && level != RegionLevel::District)
    throw ValidationError("area lookup is defined for state and district "
                          "levels only");

  double area = sum_for_year(year);
  if (area > 0.0) return area;

  // Area datasets lag recent years; fall back to the nearest within +/-2.
  for (int delta : {-1, 1, -2, 2}) {
    area = sum_for_year(year + delta);
    if (area > 0.0) {
      if (warnings)
        warnings->push_back("area for (" + region + ", " +
                            std::to_string(year) + ") missing; using " +
                            std::to_string(year + delta));
      return area;
    }
  }
  throw DataError("no gross cropped area for (" + region + ", " +
                  std::to_string(year) + ")");
}

std::vector<std::string> AreaTable::regions(RegionLevel level) const {
  std::vector<std::string> out;
  for (const auto& [key, area] : rows_) {
    const auto& [state, district, year] = key;
    const std::string& name =
        level == RegionLevel::State ? state : district;
    if (std::find(out.begin(), out.end(), name) == out.end())
      out.push_back(name);
  }
  std::sort(out.begin(), out.end());
  return out;
}

FrequencySeries normalize_by_area(const FrequencySeries& series,
                                  const AreaTable& areas,
                                  std::vector<std::string>* warnings) {
  if (series.normalized)
    throw ValidationError("series is already normalized");
  if (series.key.level != RegionLevel::State &&
      series.key.level != RegionLevel::District)
    throw ValidationError(
        "area normalization requires a state- or district-level series");

  FrequencySeries out = series;
  out.normalized = true;
  out.unit = "queries per 1000 ha";
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    int year = series.date_at(i).year;
    double area =
        areas.area_for(series.key.level, series.key.region_name, year,
                       warnings);
    out.values[i] = series.values[i] * 1000.0 / area;
  }
  return out;
}

std::array<double, 12> monthly_profile(const FrequencySeries& series) {
  std::array<double, 12> profile{};
  for (std::size_t i = 0; i < series.values.size(); ++i) {
    int month = series.date_at(i).month;
    profile[static_cast<std::size_t>(month - 1)] += series.values[i];
  }
  return profile;
}

std::vector<RegionValue> choropleth_export(
    std::span<const lexicon::LabelledRecord> labelled,
    const std::string& pest_id, const DateWindow& period, RegionLevel level,
    const AreaTable& areas, std::vector<std::string>* warnings) {
  if (level != RegionLevel::State && level != RegionLevel::District)
    throw ValidationError("choropleth export supports state and district "
                          "levels only");

  // Per-region, per-year counts so each year is normalized by its own area.
  std::map<std::string, std::map<int, double>> counts;
  for (const auto& name : areas.regions(level)) counts[name];  // zero rows

  for (const auto& rec : labelled) {
    if (!pest_id.empty() && rec.second.pest_id != pest_id) continue;
    const Date d = rec.first.created_on.date;
    if (d < period.from || d > period.to) continue;
    const std::string& region =
        level == RegionLevel::State ? rec.first.state : rec.first.district;
    counts[region][d.year] += 1.0;
  }

  std::vector<RegionValue> rows;
  rows.reserve(counts.size());
  for (const auto& [region, by_year] : counts) {
    // Regions present only in the query data but absent from the area table
    // cannot be normalized; skip them.
    bool has_area = true;
    double value = 0.0;
    if (by_year.empty()) {
      rows.push_back({region, 0.0});
      continue;
    }
    try {
      for (const auto& [year, count] : by_year)
        value += count * 1000.0 / areas.area_for(level, region, year, warnings);
    } catch (const DataError&) {
      has_area = false;
    }
    if (has_area) rows.push_back({region, value});
  }

  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    if (a.value != b.value) return a.value > b.value;
    return a.region < b.region;
  });
  return rows;
}

}  // namespace pestpulse::agg
