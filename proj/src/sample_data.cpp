#include "pestpulse/sample_data.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <algorithm>
#include <numbers>
#include <sstream>
#include <vector>

#include "pestpulse/csv.hpp"
#include "pestpulse/dates.hpp"
#include "pestpulse/rng.hpp"

namespace pestpulse::sampledata {

namespace {

struct District {
  const char* state;
  const char* district;
  const char* block;
  double gca_ha;
};

constexpr std::array<District, 6> kDistricts = {{
    {"PUNJAB", "LUDHIANA", "SAMRALA", 581000.0},
    {"PUNJAB", "BATHINDA", "RAMPURA", 562000.0},
    {"MAHARASHTRA", "PUNE", "BARAMATI", 948000.0},
    {"MAHARASHTRA", "NAGPUR", "KATOL", 676000.0},
    {"TAMILNADU", "TIRUCHIRAPPALLI", "PULLAMBADI", 392000.0},
    {"TAMILNADU", "COIMBATORE", "POLLACHI", 334000.0},
}};

constexpr std::array<const char*, 8> kCrops = {
    "Wheat",     "Paddy (Dhan)", "Cotton (Kapas)", "Mustard",
    "Black Gram", "Brinjal",     "Sugarcane",      "Maize"};

struct PestTemplates {
  const char* pest;
  std::array<const char*, 3> queries;
  const char* answer;
};

const std::array<PestTemplates, 6> kPests = {{
    {"aphid",
     {"aphids attack in %s", "aphid infestation on %s",
      "how to control aphids in %s"},
     "spray imidacloprid 0.3 ml per liter"},
    {"whitefly",
     {"whitefly attack on %s", "white fly problem in %s",
      "whiteflies on %s leaves"},
     "spray triazophos 2 ml per liter"},
    {"bollworm",
     {"bollworm in %s", "boll worm damage in %s", "bollworms attack on %s"},
     "recommended for spray quinalphos 2ml per liter"},
    {"stemborer",
     {"stem borer in %s", "stemborer attack in %s", "stem borers in %s crop"},
     "apply cartap hydrochloride granules"},
    {"termite",
     {"termite problem in %s field", "termites in %s", "termite attack on %s"},
     "apply chlorpyriphos with irrigation water"},
    {"locust",
     {"locust swarm near %s field", "locusts attack on %s",
      "locust control in %s"},
     "contact plant protection officer immediately"},
}};

const std::array<const char*, 8> kBackgroundQueries = {
    "fertilizer dose for %s",       "seed rate of %s per acre",
    "weather information for %s sowing", "market rate of %s",
    "irrigation schedule for %s",   "weed management in %s",
    "variety recommendation for %s", "soil testing for %s field"};

const std::array<const char*, 4> kBackgroundAnswers = {
    "apply urea 50 kg per acre", "use certified seed only",
    "contact local mandi for rates", "told about recommended practices"};

std::string fill_template(const char* tmpl, const std::string& crop) {
  std::string out(tmpl);
  auto pos = out.find("%s");
  if (pos != std::string::npos) out.replace(pos, 2, crop);
  return out;
}

std::string lowercase(std::string s) {
  for (char& c : s)
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

const char* season_for_month(int month) {
  if (month >= 11 || month <= 3) return "RABI";
  if (month >= 6 && month <= 9) return "KHARIF";
  return "ZAID";
}

struct RowWriter {
  std::ostringstream out;

  RowWriter() {
    const std::vector<std::string> header = {
        "Season",    "Sector",       "Category",  "Crop",
        "QueryType", "QueryText",    "KccAns",    "StateName",
        "DistrictName", "BlockName", "CreatedOn"};
    write_csv_row(out, header);
  }

  void add(const std::string& season, const std::string& crop,
           const std::string& query_type, const std::string& query,
           const std::string& answer, const District& where,
           const std::string& created_on) {
    const std::vector<std::string> row = {
        season,          "AGRICULTURE", "Field Crops", crop,
        query_type,      query,         answer,        where.state,
        where.district,  where.block,   created_on};
    write_csv_row(out, row);
  }

  void add_raw(const std::vector<std::string>& row) {
    write_csv_row(out, row);
  }
};

std::string timestamp_in_month(SeededRng& rng, int year, int month) {
  const int day = rng.uniform_int(1, 28);
  DateTime t;
  t.date = {year, month, day};
  t.hour = rng.uniform_int(7, 19);
  t.minute = rng.uniform_int(0, 59);
  t.second = rng.uniform_int(0, 59);
  t.millisecond = rng.uniform_int(0, 999);
  return format_timestamp(t);
}

}  // namespace

std::string kcc_csv(const CorpusSpec& spec) {
  SeededRng rng(spec.seed);
  RowWriter writer;

  // Planted aphid signal: a spiky single-peak annual profile (late winter
  // outbreak, quiet monsoon) plus a month-over-year AR(1) deviation at lag
  // 12, so the period-12 structure is neither a smooth trend-ARMA resonance
  // nor a purely deterministic cycle.
  constexpr std::array<double, 12> kAphidProfile = {30, 48, 55, 34, 12, 5,
                                                    3,  4,  6,  8,  12, 18};
  std::array<double, 12> seasonal_dev{};

  for (int m = 0; m < spec.months; ++m) {
    const int year = spec.start_year + m / 12;
    const int month = m % 12 + 1;
    const std::string season = season_for_month(month);

    double& dev = seasonal_dev[static_cast<std::size_t>(month - 1)];
    dev = 0.7 * dev + 3.0 * rng.gaussian();
    int aphid_count = static_cast<int>(std::lround(
        kAphidProfile[static_cast<std::size_t>(month - 1)] + dev +
        1.5 * rng.gaussian()));
    if (aphid_count < 1) aphid_count = 1;

    for (int i = 0; i < aphid_count; ++i) {
      const auto& where =
          kDistricts[static_cast<std::size_t>(rng.uniform_int(0, 5))];
      const std::string crop =
          lowercase(kCrops[static_cast<std::size_t>(rng.uniform_int(0, 7))]);
      const auto& tmpl = kPests[0];
      std::string query = fill_template(
          tmpl.queries[static_cast<std::size_t>(rng.uniform_int(0, 2))], crop);
      // A sprinkle of single-edit misspellings for the fuzzy matcher.
      if (rng.uniform() < 0.04) {
        auto pos = query.find("aphid");
        if (pos != std::string::npos) query.replace(pos, 5, "ahpid");
      }
      writer.add(season, crop, "Plant Protection", query, tmpl.answer, where,
                 timestamp_in_month(rng, year, month));
    }

    // Secondary pests at lower, loosely seasonal volumes.
    const int whitefly = (month >= 1 && month <= 4) ? rng.uniform_int(4, 7)
                                                    : rng.uniform_int(0, 1);
    const int bollworm = (month >= 8 && month <= 10) ? rng.uniform_int(2, 5)
                                                     : rng.uniform_int(0, 1);
    const int stemborer = rng.uniform_int(1, 3);
    const int termite = rng.uniform_int(0, 2);
    const int locust = (year == 2020 && month <= 6) ? rng.uniform_int(2, 6)
                                                    : 0;
    const std::array<int, 5> counts = {whitefly, bollworm, stemborer, termite,
                                       locust};
    for (std::size_t pest = 0; pest < counts.size(); ++pest) {
      for (int i = 0; i < counts[pest]; ++i) {
        const auto& where =
            kDistricts[static_cast<std::size_t>(rng.uniform_int(0, 5))];
        const std::string crop =
            lowercase(kCrops[static_cast<std::size_t>(rng.uniform_int(0, 7))]);
        const auto& tmpl = kPests[pest + 1];
        const std::string query = fill_template(
            tmpl.queries[static_cast<std::size_t>(rng.uniform_int(0, 2))],
            crop);
        writer.add(season, crop, "Plant Protection", query, tmpl.answer, where,
                   timestamp_in_month(rng, year, month));
      }
    }

    for (int i = 0; i < spec.background_per_month; ++i) {
      const auto& where =
          kDistricts[static_cast<std::size_t>(rng.uniform_int(0, 5))];
      const std::string crop =
          lowercase(kCrops[static_cast<std::size_t>(rng.uniform_int(0, 7))]);
      const std::string query = fill_template(
          kBackgroundQueries[static_cast<std::size_t>(rng.uniform_int(0, 7))],
          crop);
      const std::string answer =
          kBackgroundAnswers[static_cast<std::size_t>(rng.uniform_int(0, 3))];
      writer.add(season, crop, "General", query, answer, where,
                 timestamp_in_month(rng, year, month));
    }
  }

  // Rows that ingest must reject, one flavour each.
  for (int i = 0; i < 12; ++i) {
    writer.add_raw({"RABI", "AGRICULTURE", "Field Crops", "Wheat", "General",
                    "fertilizer dose for wheat", "apply urea 50 kg per acre",
                    "PUNJAB", "", "", "2017-02-10 11:05:00.000"});
  }
  for (int i = 0; i < 4; ++i) {
    writer.add_raw({"RABI", "AGRICULTURE", "Field Crops", "Wheat", "General",
                    "seed rate of wheat per acre", "use certified seed only",
                    "PUNJAB", "LUDHIANA", "SAMRALA", "10/02/2017 11:05"});
  }
  for (int i = 0; i < 3; ++i) {
    writer.add_raw({"KHARIF", "AGRICULTURE", "Field Crops", "Paddy (Dhan)",
                    "General", "irrigation schedule for paddy",
                    "told about recommended practices", "TAMILNADU",
                    "COIMBATORE", "POLLACHI", "2013-07-21 09:30:00.000"});
  }

  return writer.out.str();
}

std::string area_csv() {
  std::ostringstream out;
  write_csv_row(out, std::vector<std::string>{"state", "district", "year",
                                              "gca_ha"});
  for (int year = 2015; year <= 2020; ++year) {
    for (const auto& d : kDistricts) {
      // Mild year-on-year drift keeps the table realistic.
      const double area = d.gca_ha * (1.0 + 0.004 * (year - 2015));
      std::vector<std::string> row = {d.state, d.district,
                                      std::to_string(year)};
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.0f", area);
      row.push_back(buf);
      write_csv_row(out, row);
    }
  }
  return out.str();
}

std::string lexicon_json() {
  return R"([
  {"id": "whitefly", "name": "whitefly", "aliases": ["white fly", "whiteflies", "white flies"]},
  {"id": "bollworm", "name": "bollworm", "aliases": ["boll worm", "bollworms", "american bollworm"]},
  {"id": "armyworm", "name": "armyworm", "aliases": ["army worm", "armyworms", "fall armyworm"]},
  {"id": "locust", "name": "locust", "aliases": ["locusts", "tiddi"]},
  {"id": "aphid", "name": "aphid", "aliases": ["aphids", "mahu"]},
  {"id": "bug", "name": "bug", "aliases": ["bugs", "mealybug", "mealy bug"]},
  {"id": "stemborer", "name": "stemborer", "aliases": ["stem borer", "stemborers", "stem borers"]},
  {"id": "termite", "name": "termite", "aliases": ["termites", "deemak"]},
  {"id": "insect", "name": "insect", "aliases": ["insects"]},
  {"id": "pod borer", "name": "pod borer", "aliases": ["podborer", "pod borers", "gram pod borer"]}
]
)";
}

std::string random_walk_series_csv(std::uint64_t seed, int n) {
  SeededRng rng(seed);
  std::ostringstream out;
  write_csv_row(out, std::vector<std::string>{"date", "region_level", "region",
                                              "pest_id", "value", "unit"});
  double level = 120.0;
  Date date{2015, 1, 1};
  for (int i = 0; i < n; ++i) {
    level += rng.gaussian();
    if (level < 0.0) level = 0.0;
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", level);
    write_csv_row(out, std::vector<std::string>{format_date(date), "national",
                                                "", "all", buf, "queries"});
    date = add_days(date, 1);
  }
  return out.str();
}

}  // namespace pestpulse::sampledata
