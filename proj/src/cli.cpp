#include "pestpulse/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>
#include <json.hpp>

#include "pestpulse/aggregate.hpp"
#include "pestpulse/diagnostics.hpp"
#include "pestpulse/digest.hpp"
#include "pestpulse/errors.hpp"
#include "pestpulse/ingest.hpp"
#include "pestpulse/io.hpp"
#include "pestpulse/lexicon.hpp"
#include "pestpulse/sarima.hpp"
#include "pestpulse/text.hpp"

namespace pestpulse::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int default_threads() {
  if (const char* env = std::getenv("PESTPULSE_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Tracks a run's configuration and artifacts, then drops a manifest beside
// the outputs. Writes are atomic: temp .partial file then rename, so an
// aborted stage leaves only .partial debris.
class RunContext {
 public:
  RunContext(std::string subcommand, std::uint64_t seed, int threads)
      : subcommand_(std::move(subcommand)) {
    config_["seed"] = seed;
    config_["threads"] = threads;
  }

  template <typename T>
  void set_config(const std::string& key, const T& value) {
    config_[key] = value;
  }

  void note_input(const fs::path& path) {
    inputs_[path.filename().string()] = file_digest(path);
  }

  void write_output(const fs::path& path, const std::string& content) {
    fs::path tmp = path;
    tmp += ".partial";
    {
      std::ofstream out(tmp, std::ios::binary);
      if (!out) throw DataError("cannot write " + tmp.string());
      out << content;
      if (!out) throw DataError("write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
    outputs_[path.filename().string()] = digest_string(content);
  }

  void write_manifest(const fs::path& path) {
    json doc;
    doc["artifact"] = "pestpulse";
    doc["version"] = kArtifactVersion;
    doc["subcommand"] = subcommand_;
    doc["config"] = config_;
    doc["inputs"] = inputs_;
    doc["outputs"] = outputs_;
    write_output(path, doc.dump(2) + "\n");
  }

 private:
  std::string subcommand_;
  json config_ = json::object();
  json inputs_ = json::object();
  json outputs_ = json::object();
};

fs::path manifest_path_for(const fs::path& primary_output) {
  fs::path p = primary_output;
  p += ".manifest.json";
  return p;
}

ingest::IngestConfig make_ingest_config(const std::string& date_from,
                                        const std::string& date_to,
                                        const std::string& columns_map) {
  ingest::IngestConfig config;
  if (!date_from.empty()) {
    auto d = parse_date(date_from);
    if (!d) throw ValidationError("bad --date-from '" + date_from + "'");
    config.date_from = *d;
  }
  if (!date_to.empty()) {
    auto d = parse_date(date_to);
    if (!d) throw ValidationError("bad --date-to '" + date_to + "'");
    config.date_to = *d;
  }
  if (!columns_map.empty()) {
    std::stringstream ss(columns_map);
    std::string pair;
    while (std::getline(ss, pair, ',')) {
      auto eq = pair.find('=');
      if (eq == std::string::npos)
        throw ValidationError("--columns-map expects Logical=Header pairs");
      config.column_map[trim(pair.substr(0, eq))] = trim(pair.substr(eq + 1));
    }
  }
  return config;
}

sarima::SarimaOrder parse_order(const std::string& text) {
  std::vector<int> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      parts.push_back(std::stoi(trim(item)));
    } catch (const std::exception&) {
      throw ValidationError("--order expects integers p,d,q,P,D,Q,s");
    }
  }
  if (parts.size() != 7)
    throw ValidationError("--order expects p,d,q,P,D,Q,s");
  sarima::SarimaOrder order{parts[0], parts[1], parts[2], parts[3],
                            parts[4], parts[5], parts[6]};
  order.validate();
  return order;
}

std::vector<int> parse_seasons(const std::string& text) {
  std::vector<int> seasons;
  if (text.empty()) return seasons;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    int s = 0;
    try {
      s = std::stoi(trim(item));
    } catch (const std::exception&) {
      throw ValidationError("--seasons expects integers");
    }
    if (s < 2) throw ValidationError("--seasons entries must be >= 2");
    seasons.push_back(s);
  }
  std::sort(seasons.begin(), seasons.end());
  seasons.erase(std::unique(seasons.begin(), seasons.end()), seasons.end());
  return seasons;
}

diag::LagPolicy parse_lag_policy(const std::string& text) {
  if (text.empty() || text == "auto") return diag::LagPolicy::aic_auto();
  try {
    return diag::LagPolicy::fixed(std::stoi(text));
  } catch (const std::exception&) {
    throw ValidationError("--lags expects 'auto' or an integer");
  }
}

// Calendar dates for bins [first_index, first_index + count) of a series,
// which may extend past its last observed bin.
std::vector<Date> forecast_dates(const agg::FrequencySeries& series,
                                 std::size_t first_index, std::size_t count) {
  std::vector<Date> dates;
  dates.reserve(count);
  for (std::size_t i = 0; i < count; ++i)
    dates.push_back(series.date_at(first_index + i));
  return dates;
}

std::string series_to_csv(const agg::FrequencySeries& series) {
  std::ostringstream out;
  io::write_series_csv(out, series);
  return out.str();
}

// ---- subcommand options ----

struct CommonOpts {
  std::uint64_t seed = 42;
  int threads = 0;
};

struct IngestOpts {
  std::string input, output, report;
  std::string date_from, date_to, columns_map;
  std::string preprocessor = "normalize";
};

struct LabelOpts {
  std::string input, lexicon, output, stats;
};

struct SeriesOpts {
  std::string input, output;
  std::string pest = "all";
  std::string region_level = "national";
  std::string region;
  std::string bin = "monthly";
  bool normalize = false;
  std::string areas;
  std::string date_from, date_to;
  std::string profile_out;
};

struct MapOpts {
  std::string input, output, json_out;
  std::string pest;
  std::string from, to;
  std::string level = "state";
  std::string areas;
};

struct AcfOpts {
  std::string input, output;
  int max_lag = 24;
};

struct AdfOpts {
  std::string input, output;
  std::string lags = "auto";
};

struct StationarizeOpts {
  std::string input, output, record;
  std::string lags = "auto";
};

struct FitOpts {
  std::string input, output;
  std::string order;
  bool grid = false;
  std::string seasons;
  std::string record;
  std::string leaderboard;
};

struct ForecastOpts {
  std::string model, input, output;
  int horizon = 12;
  double level = 0.95;
};

struct EvalOpts {
  std::string forecast, actual, output;
};

struct PipelineOpts {
  std::string input, lexicon, areas, out_dir;
  std::string pest = "aphid";
  std::string region_level = "national";
  std::string region;
  std::string bin = "monthly";
  std::string grid = "default";
  std::string seasons;
  int horizon = 12;
  double level = 0.95;
  double train_fraction = 0.7;
  std::string date_from, date_to;
};

// ---- command bodies ----

void cmd_ingest(const CommonOpts& common, const IngestOpts& opt) {
  RunContext ctx("ingest", common.seed, common.threads);
  ctx.set_config("input", fs::path(opt.input).filename().string());
  ctx.set_config("date_from", opt.date_from);
  ctx.set_config("date_to", opt.date_to);
  ctx.set_config("columns_map", opt.columns_map);
  ctx.set_config("preprocessor", opt.preprocessor);
  ctx.note_input(opt.input);

  auto config = make_ingest_config(opt.date_from, opt.date_to,
                                   opt.columns_map);
  std::ifstream in(opt.input, std::ios::binary);
  if (!in) throw DataError("cannot open " + opt.input);
  auto [records, report] = ingest::parse_records(in, config);

  if (opt.preprocessor == "normalize") {
    records = ingest::preprocess_corpus(std::move(records),
                                        ingest::normalize_preprocessor(),
                                        report);
  } else if (opt.preprocessor != "identity") {
    throw ValidationError("--preprocessor must be identity or normalize");
  }

  std::ostringstream out;
  ingest::write_records_csv(out, records, config);
  ctx.write_output(opt.output, out.str());
  if (!opt.report.empty())
    ctx.write_output(opt.report, io::ingest_report_json(report));
  ctx.write_manifest(manifest_path_for(opt.output));
  std::cerr << "ingest: accepted " << report.accepted << " of "
            << report.total_rows << " rows\n";
}

void cmd_label(const CommonOpts& common, const LabelOpts& opt) {
  RunContext ctx("label", common.seed, common.threads);
  ctx.set_config("input", fs::path(opt.input).filename().string());
  ctx.set_config("lexicon", fs::path(opt.lexicon).filename().string());
  ctx.note_input(opt.input);
  ctx.note_input(opt.lexicon);

  auto lex = lexicon::PestLexicon::load(opt.lexicon);
  std::ifstream in(opt.input, std::ios::binary);
  if (!in) throw DataError("cannot open " + opt.input);
  // The input is already cleaned; accept any timestamp it carries.
  ingest::IngestConfig wide;
  wide.date_from = Date{1900, 1, 1};
  wide.date_to = Date{2999, 12, 31};
  auto [records, report] = ingest::parse_records(in, wide);
  auto [labelled, stats] =
      lexicon::label_corpus(records, lex, common.threads);

  std::ostringstream out;
  io::write_labelled_csv(out, labelled);
  ctx.write_output(opt.output, out.str());
  if (!opt.stats.empty())
    ctx.write_output(opt.stats, io::label_stats_json(stats));
  ctx.write_manifest(manifest_path_for(opt.output));
  std::cerr << "label: " << stats.labelled << " of " << stats.total
            << " queries are pest-related\n";
}

agg::DateWindow window_from(const std::string& from, const std::string& to) {
  agg::DateWindow window;
  if (!from.empty()) {
    auto d = parse_date(from);
    if (!d) throw ValidationError("bad date '" + from + "'");
    window.from = *d;
  }
  if (!to.empty()) {
    auto d = parse_date(to);
    if (!d) throw ValidationError("bad date '" + to + "'");
    window.to = *d;
  }
  return window;
}

void cmd_series(const CommonOpts& common, const SeriesOpts& opt) {
  RunContext ctx("series", common.seed, common.threads);
  ctx.set_config("input", fs::path(opt.input).filename().string());
  ctx.set_config("pest", opt.pest);
  ctx.set_config("region_level", opt.region_level);
  ctx.set_config("region", opt.region);
  ctx.set_config("bin", opt.bin);
  ctx.set_config("normalize", opt.normalize);
  ctx.note_input(opt.input);

  std::ifstream in(opt.input, std::ios::binary);
  if (!in) throw DataError("cannot open " + opt.input);
  auto labelled = io::read_labelled_csv(in);

  agg::SeriesKey key;
  key.level = agg::parse_region_level(opt.region_level);
  key.region_name = canonical_region(opt.region);
  key.pest_id = opt.pest == "all" ? "" : opt.pest;
  const agg::DateWindow window = window_from(opt.date_from, opt.date_to);
  auto series = agg::build_series(labelled, key, agg::parse_bin(opt.bin),
                                  window, common.threads);

  if (opt.normalize) {
    if (opt.areas.empty())
      throw ValidationError("--normalize requires --areas");
    ctx.note_input(opt.areas);
    std::ifstream areas_in(opt.areas, std::ios::binary);
    if (!areas_in) throw DataError("cannot open " + opt.areas);
    auto areas = agg::AreaTable::load_csv(areas_in);
    std::vector<std::string> warnings;
    series = agg::normalize_by_area(series, areas, &warnings);
    for (const auto& w : warnings) std::cerr << "series: " << w << "\n";
  }

  ctx.write_output(opt.output, series_to_csv(series));
  if (!opt.profile_out.empty()) {
    std::ostringstream out;
    io::write_profile_csv(out, agg::monthly_profile(series));
    ctx.write_output(opt.profile_out, out.str());
  }
  ctx.write_manifest(manifest_path_for(opt.output));
}

void cmd_map(const CommonOpts& common, const MapOpts& opt) {
  RunContext ctx("map", common.seed, common.threads);
  ctx.set_config("pest", opt.pest);
  ctx.set_config("from", opt.from);
  ctx.set_config("to", opt.to);
  ctx.set_config("level", opt.level);
  ctx.note_input(opt.input);
  ctx.note_input(opt.areas);

  std::ifstream in(opt.input, std::ios::binary);
  if (!in) throw DataError("cannot open " + opt.input);
  auto labelled = io::read_labelled_csv(in);
  std::ifstream areas_in(opt.areas, std::ios::binary);
  if (!areas_in) throw DataError("cannot open " + opt.areas);
  auto areas = agg::AreaTable::load_csv(areas_in);

  const agg::DateWindow period = window_from(opt.from, opt.to);
  std::vector<std::string> warnings;
  auto rows = agg::choropleth_export(labelled, opt.pest, period,
                                     agg::parse_region_level(opt.level), areas,
                                     &warnings);
  for (const auto& w : warnings) std::cerr << "map: " << w << "\n";

  std::ostringstream out;
  io::write_region_values_csv(out, rows);
  ctx.write_output(opt.output, out.str());
  if (!opt.json_out.empty())
    ctx.write_output(opt.json_out, io::region_values_json(rows));
  ctx.write_manifest(manifest_path_for(opt.output));
}

agg::FrequencySeries load_series(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  return io::read_series_csv(in);
}

void cmd_acf(const CommonOpts& common, const AcfOpts& opt) {
  RunContext ctx("acf", common.seed, common.threads);
  ctx.set_config("max_lag", opt.max_lag);
  ctx.note_input(opt.input);
  auto series = load_series(opt.input);
  auto r = diag::acf(series.values, opt.max_lag);
  std::ostringstream out;
  io::write_acf_csv(out, r);
  ctx.write_output(opt.output, out.str());
  ctx.write_manifest(manifest_path_for(opt.output));
}

void cmd_adf(const CommonOpts& common, const AdfOpts& opt) {
  RunContext ctx("adf", common.seed, common.threads);
  ctx.set_config("lags", opt.lags);
  ctx.note_input(opt.input);
  auto series = load_series(opt.input);
  auto result = diag::adf_test(series.values, parse_lag_policy(opt.lags));
  ctx.write_output(opt.output, io::adf_result_json(result));
  ctx.write_manifest(manifest_path_for(opt.output));
  std::cerr << "adf: statistic " << result.statistic << ", "
            << (result.stationary_at_5pct ? "stationary" : "non-stationary")
            << " at 5%\n";
}

// Transformed series keep calendar alignment by dropping leading bins.
agg::FrequencySeries transformed_series(const agg::FrequencySeries& base,
                                        const std::vector<double>& values) {
  agg::FrequencySeries out = base;
  const std::size_t dropped = base.values.size() - values.size();
  out.start = base.date_at(dropped);
  out.values = values;
  return out;
}

void cmd_stationarize(const CommonOpts& common, const StationarizeOpts& opt) {
  RunContext ctx("stationarize", common.seed, common.threads);
  ctx.set_config("lags", opt.lags);
  ctx.note_input(opt.input);
  auto series = load_series(opt.input);
  auto result = diag::stationarize(series.values, parse_lag_policy(opt.lags));

  ctx.write_output(opt.output,
                   series_to_csv(transformed_series(series, result.values)));
  if (!opt.record.empty()) {
    json doc = json::parse(io::transform_record_json(result.record));
    doc["adf"] = json::parse(io::adf_result_json(result.adf));
    ctx.write_output(opt.record, doc.dump(2) + "\n");
  }
  ctx.write_manifest(manifest_path_for(opt.output));
  std::cerr << "stationarize: log=" << (result.record.log_applied ? "yes" : "no")
            << ", differences=" << result.record.diffs.size() << "\n";
}

void cmd_fit(const CommonOpts& common, const FitOpts& opt) {
  RunContext ctx("fit", common.seed, common.threads);
  ctx.set_config("order", opt.order);
  ctx.set_config("grid", opt.grid);
  ctx.set_config("seasons", opt.seasons);
  ctx.note_input(opt.input);

  auto series = load_series(opt.input);
  diag::TransformRecord record;
  if (!opt.record.empty()) {
    ctx.note_input(opt.record);
    record = io::parse_transform_record(read_file(opt.record));
  }

  sarima::SarimaModel model;
  std::vector<sarima::GridEntry> leaderboard;
  if (!opt.order.empty()) {
    model = sarima::fit(series.values, parse_order(opt.order));
    if (!model.converged)
      std::cerr << "fit: optimizer did not converge for order "
                << model.order.to_string() << "\n";
  } else if (opt.grid) {
    sarima::GridSpec spec;
    spec.seasons = parse_seasons(opt.seasons);
    auto result = sarima::grid_search(series.values, spec, {}, common.threads);
    model = result.best;
    leaderboard = std::move(result.leaderboard);
  } else {
    throw ValidationError("fit requires --order or --grid");
  }

  ctx.write_output(opt.output, io::model_json(model, record));
  if (!opt.leaderboard.empty()) {
    std::ostringstream out;
    io::write_leaderboard_csv(out, leaderboard);
    ctx.write_output(opt.leaderboard, out.str());
  }
  ctx.write_manifest(manifest_path_for(opt.output));
  std::cerr << "fit: " << model.order.to_string() << " aic " << model.aic
            << "\n";
}

void cmd_forecast(const CommonOpts& common, const ForecastOpts& opt) {
  RunContext ctx("forecast", common.seed, common.threads);
  ctx.set_config("horizon", opt.horizon);
  ctx.set_config("level", opt.level);
  ctx.note_input(opt.model);
  ctx.note_input(opt.input);

  auto [model, record] = io::parse_model_json(read_file(opt.model));
  auto series = load_series(opt.input);

  std::vector<double> history = series.values;
  if (record.log_applied) history = diag::log_transform(history);
  for (const auto& pass : record.diffs)
    history = diag::difference(history, pass.lag);

  auto fc = sarima::forecast(model, history, opt.horizon, opt.level,
                             record.empty() ? nullptr : &record);
  std::ostringstream out;
  io::write_forecast_csv(out, fc,
                         forecast_dates(series, series.values.size(),
                                        static_cast<std::size_t>(opt.horizon)));
  ctx.write_output(opt.output, out.str());
  ctx.write_manifest(manifest_path_for(opt.output));
}

void cmd_eval(const CommonOpts& common, const EvalOpts& opt) {
  RunContext ctx("eval", common.seed, common.threads);
  ctx.note_input(opt.forecast);
  ctx.note_input(opt.actual);

  std::ifstream fin(opt.forecast, std::ios::binary);
  if (!fin) throw DataError("cannot open " + opt.forecast);
  auto fc = io::read_forecast_csv(fin);
  auto actual = load_series(opt.actual);
  auto metrics = sarima::evaluate(fc, actual.values);
  ctx.write_output(opt.output, io::metrics_json(metrics));
  ctx.write_manifest(manifest_path_for(opt.output));
  std::cerr << "eval: rmse " << metrics.rmse << ", coverage "
            << metrics.ci_coverage << "\n";
}

void cmd_pipeline(const CommonOpts& common, const PipelineOpts& opt) {
  RunContext ctx("pipeline", common.seed, common.threads);
  ctx.set_config("input", fs::path(opt.input).filename().string());
  ctx.set_config("lexicon", fs::path(opt.lexicon).filename().string());
  ctx.set_config("areas",
                 opt.areas.empty() ? "" : fs::path(opt.areas).filename().string());
  ctx.set_config("pest", opt.pest);
  ctx.set_config("region_level", opt.region_level);
  ctx.set_config("region", opt.region);
  ctx.set_config("bin", opt.bin);
  ctx.set_config("grid", opt.grid);
  ctx.set_config("seasons", opt.seasons);
  ctx.set_config("horizon", opt.horizon);
  ctx.set_config("level", opt.level);
  ctx.set_config("train_fraction", opt.train_fraction);

  if (opt.grid != "default")
    throw ValidationError("--grid supports 'default'");
  if (!(opt.train_fraction > 0.0 && opt.train_fraction < 1.0))
    throw ValidationError("--train-fraction must lie in (0, 1)");
  if (opt.horizon < 1) throw ValidationError("--horizon must be >= 1");

  const fs::path dir(opt.out_dir);
  fs::create_directories(dir);

  std::string stage = "ingest";
  try {
    // ingest
    ctx.note_input(opt.input);
    auto config = make_ingest_config(opt.date_from, opt.date_to, "");
    std::ifstream in(opt.input, std::ios::binary);
    if (!in) throw DataError("cannot open " + opt.input);
    auto [records, report] = ingest::parse_records(in, config);
    records = ingest::preprocess_corpus(std::move(records),
                                        ingest::normalize_preprocessor(),
                                        report);
    {
      std::ostringstream out;
      ingest::write_records_csv(out, records, config);
      ctx.write_output(dir / "cleaned.csv", out.str());
    }
    ctx.write_output(dir / "ingest_report.json",
                     io::ingest_report_json(report));

    // label
    stage = "label";
    ctx.note_input(opt.lexicon);
    auto lex = lexicon::PestLexicon::load(opt.lexicon);
    auto [labelled, stats] =
        lexicon::label_corpus(records, lex, common.threads);
    {
      std::ostringstream out;
      io::write_labelled_csv(out, labelled);
      ctx.write_output(dir / "labelled.csv", out.str());
    }
    ctx.write_output(dir / "label_stats.json", io::label_stats_json(stats));

    // series
    stage = "series";
    agg::SeriesKey key;
    key.level = agg::parse_region_level(opt.region_level);
    key.region_name = canonical_region(opt.region);
    key.pest_id = opt.pest == "all" ? "" : opt.pest;
    const agg::DateWindow window = window_from(opt.date_from, opt.date_to);
    auto series = agg::build_series(labelled, key, agg::parse_bin(opt.bin),
                                    window, common.threads);
    if (series.total() <= 0.0)
      throw DataError("empty series: no labelled queries match pest '" +
                      opt.pest + "' at " + opt.region_level + " level");

    const bool can_normalize = !opt.areas.empty() &&
                               (key.level == agg::RegionLevel::State ||
                                key.level == agg::RegionLevel::District);
    if (can_normalize) {
      ctx.note_input(opt.areas);
      std::ifstream areas_in(opt.areas, std::ios::binary);
      if (!areas_in) throw DataError("cannot open " + opt.areas);
      auto areas = agg::AreaTable::load_csv(areas_in);
      std::vector<std::string> warnings;
      series = agg::normalize_by_area(series, areas, &warnings);
      for (const auto& w : warnings) std::cerr << "pipeline: " << w << "\n";
    }
    ctx.write_output(dir / "series.csv", series_to_csv(series));

    // stationarize
    stage = "stationarize";
    auto stat = diag::stationarize(series.values);
    ctx.write_output(dir / "stationary.csv",
                     series_to_csv(transformed_series(series, stat.values)));
    ctx.write_output(dir / "adf.json", io::adf_result_json(stat.adf));

    // split + grid search on the training span
    stage = "grid-search";
    auto [train, test] = sarima::train_test_split(stat.values,
                                                  opt.train_fraction);
    sarima::GridSpec spec;
    spec.seasons = parse_seasons(opt.seasons);
    // The stationarize trail already differenced the series.
    spec.d_max = 0;
    spec.D_max = 0;
    auto grid = sarima::grid_search(train, spec, {}, common.threads);
    {
      std::ostringstream out;
      io::write_leaderboard_csv(out, grid.leaderboard);
      ctx.write_output(dir / "leaderboard.csv", out.str());
    }

    // forecast over the held-out span, evaluated on the original scale
    stage = "forecast";
    const std::size_t dropped = series.values.size() - stat.values.size();
    auto fc_test =
        sarima::forecast(grid.best, train, static_cast<int>(test.size()),
                         opt.level, stat.record.empty() ? nullptr
                                                        : &stat.record);
    {
      std::ostringstream out;
      io::write_forecast_csv(
          out, fc_test,
          forecast_dates(series, dropped + train.size(), test.size()));
      ctx.write_output(dir / "forecast_test.csv", out.str());
    }

    stage = "evaluate";
    std::vector<double> actual(series.values.begin() +
                                   static_cast<std::ptrdiff_t>(dropped +
                                                               train.size()),
                               series.values.end());
    auto metrics = sarima::evaluate(fc_test, actual);
    ctx.write_output(dir / "metrics.json", io::metrics_json(metrics));

    // refit the selected order on the full span and forecast forward
    stage = "refit";
    auto final_model = sarima::fit(stat.values, grid.best.order);
    ctx.write_output(dir / "model.json",
                     io::model_json(final_model, stat.record));
    auto fc_future =
        sarima::forecast(final_model, stat.values, opt.horizon, opt.level,
                         stat.record.empty() ? nullptr : &stat.record);
    {
      std::ostringstream out;
      io::write_forecast_csv(out, fc_future,
                             forecast_dates(series, series.values.size(),
                                            static_cast<std::size_t>(
                                                opt.horizon)));
      ctx.write_output(dir / "forecast.csv", out.str());
    }

    ctx.write_manifest(dir / "manifest.json");
    std::cerr << "pipeline: selected " << final_model.order.to_string()
              << ", test rmse " << metrics.rmse << "\n";
  } catch (const std::exception& e) {
    throw DataError("pipeline stage '" + stage + "' failed: " + e.what());
  }
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"pestpulse: pest-surveillance signals from farmer call-center "
               "queries"};
  app.require_subcommand(1);

  CommonOpts common;
  common.threads = default_threads();
  app.add_option("--seed", common.seed, "Seed for all randomized steps");
  app.add_option("--threads", common.threads,
                 "Worker threads (default: PESTPULSE_THREADS or all cores)");

  IngestOpts ingest_opts;
  auto* cmd_ing = app.add_subcommand("ingest", "Parse and clean a KCC dump");
  cmd_ing->fallthrough();
  cmd_ing->add_option("--input", ingest_opts.input)->required();
  cmd_ing->add_option("--output", ingest_opts.output)->required();
  cmd_ing->add_option("--report", ingest_opts.report);
  cmd_ing->add_option("--date-from", ingest_opts.date_from);
  cmd_ing->add_option("--date-to", ingest_opts.date_to);
  cmd_ing->add_option("--columns-map", ingest_opts.columns_map,
                      "Logical=Header pairs, comma separated");
  cmd_ing->add_option("--preprocessor", ingest_opts.preprocessor)
      ->check(CLI::IsMember({"identity", "normalize"}));

  LabelOpts label_opts;
  auto* cmd_lab = app.add_subcommand("label", "Label pest queries");
  cmd_lab->fallthrough();
  cmd_lab->add_option("--input", label_opts.input)->required();
  cmd_lab->add_option("--lexicon", label_opts.lexicon)->required();
  cmd_lab->add_option("--output", label_opts.output)->required();
  cmd_lab->add_option("--stats", label_opts.stats);

  SeriesOpts series_opts;
  auto* cmd_ser = app.add_subcommand("series", "Build a frequency series");
  cmd_ser->fallthrough();
  cmd_ser->add_option("--input", series_opts.input)->required();
  cmd_ser->add_option("--output", series_opts.output)->required();
  cmd_ser->add_option("--pest", series_opts.pest);
  cmd_ser->add_option("--region-level", series_opts.region_level);
  cmd_ser->add_option("--region", series_opts.region);
  cmd_ser->add_option("--bin", series_opts.bin);
  cmd_ser->add_flag("--normalize", series_opts.normalize);
  cmd_ser->add_option("--areas", series_opts.areas);
  cmd_ser->add_option("--date-from", series_opts.date_from);
  cmd_ser->add_option("--date-to", series_opts.date_to);
  cmd_ser->add_option("--monthly-profile", series_opts.profile_out);

  MapOpts map_opts;
  auto* cmd_mp = app.add_subcommand("map", "Choropleth region/value export");
  cmd_mp->fallthrough();
  cmd_mp->add_option("--input", map_opts.input)->required();
  cmd_mp->add_option("--output", map_opts.output)->required();
  cmd_mp->add_option("--json", map_opts.json_out);
  cmd_mp->add_option("--pest", map_opts.pest)->required();
  cmd_mp->add_option("--from", map_opts.from)->required();
  cmd_mp->add_option("--to", map_opts.to)->required();
  cmd_mp->add_option("--level", map_opts.level);
  cmd_mp->add_option("--areas", map_opts.areas)->required();

  AcfOpts acf_opts;
  auto* cmd_ac = app.add_subcommand("acf", "Autocorrelation table");
  cmd_ac->fallthrough();
  cmd_ac->add_option("--input", acf_opts.input)->required();
  cmd_ac->add_option("--output", acf_opts.output)->required();
  cmd_ac->add_option("--max-lag", acf_opts.max_lag);

  AdfOpts adf_opts;
  auto* cmd_ad = app.add_subcommand("adf", "Dickey-Fuller unit-root test");
  cmd_ad->fallthrough();
  cmd_ad->add_option("--input", adf_opts.input)->required();
  cmd_ad->add_option("--output", adf_opts.output)->required();
  cmd_ad->add_option("--lags", adf_opts.lags, "auto or a fixed lag count");

  StationarizeOpts stat_opts;
  auto* cmd_st = app.add_subcommand("stationarize",
                                    "Transform a series to stationarity");
  cmd_st->fallthrough();
  cmd_st->add_option("--input", stat_opts.input)->required();
  cmd_st->add_option("--output", stat_opts.output)->required();
  cmd_st->add_option("--record", stat_opts.record);
  cmd_st->add_option("--lags", stat_opts.lags);

  FitOpts fit_opts;
  auto* cmd_ft = app.add_subcommand("fit", "Fit a seasonal ARIMA model");
  cmd_ft->fallthrough();
  cmd_ft->add_option("--input", fit_opts.input)->required();
  cmd_ft->add_option("--output", fit_opts.output)->required();
  cmd_ft->add_option("--order", fit_opts.order, "p,d,q,P,D,Q,s");
  cmd_ft->add_flag("--grid", fit_opts.grid, "AIC grid search over orders");
  cmd_ft->add_option("--seasons", fit_opts.seasons,
                     "Seasonal period candidates, comma separated");
  cmd_ft->add_option("--record", fit_opts.record,
                     "Transform record to embed in the model file");
  cmd_ft->add_option("--leaderboard", fit_opts.leaderboard);

  ForecastOpts fc_opts;
  auto* cmd_fc = app.add_subcommand("forecast", "Forecast from a fitted model");
  cmd_fc->fallthrough();
  cmd_fc->add_option("--model", fc_opts.model)->required();
  cmd_fc->add_option("--input", fc_opts.input)->required();
  cmd_fc->add_option("--output", fc_opts.output)->required();
  cmd_fc->add_option("--horizon", fc_opts.horizon)->required();
  cmd_fc->add_option("--level", fc_opts.level);

  EvalOpts eval_opts;
  auto* cmd_ev = app.add_subcommand("eval", "Score a forecast against actuals");
  cmd_ev->fallthrough();
  cmd_ev->add_option("--forecast", eval_opts.forecast)->required();
  cmd_ev->add_option("--actual", eval_opts.actual)->required();
  cmd_ev->add_option("--output", eval_opts.output)->required();

  PipelineOpts pipe_opts;
  auto* cmd_pp = app.add_subcommand("pipeline", "Full ingest-to-forecast run");
  cmd_pp->fallthrough();
  cmd_pp->add_option("--input", pipe_opts.input)->required();
  cmd_pp->add_option("--lexicon", pipe_opts.lexicon)->required();
  cmd_pp->add_option("--areas", pipe_opts.areas);
  cmd_pp->add_option("--out-dir", pipe_opts.out_dir)->required();
  cmd_pp->add_option("--pest", pipe_opts.pest);
  cmd_pp->add_option("--region-level", pipe_opts.region_level);
  cmd_pp->add_option("--region", pipe_opts.region);
  cmd_pp->add_option("--bin", pipe_opts.bin);
  cmd_pp->add_option("--grid", pipe_opts.grid);
  cmd_pp->add_option("--seasons", pipe_opts.seasons);
  cmd_pp->add_option("--horizon", pipe_opts.horizon);
  cmd_pp->add_option("--level", pipe_opts.level);
  cmd_pp->add_option("--train-fraction", pipe_opts.train_fraction);
  cmd_pp->add_option("--date-from", pipe_opts.date_from);
  cmd_pp->add_option("--date-to", pipe_opts.date_to);

  if (args.empty()) {
    std::cerr << app.help() << std::flush;
    return 1;
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help() << std::flush;
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help() << std::flush;
    return 1;
  }

  try {
    if (*cmd_ing) cmd_ingest(common, ingest_opts);
    if (*cmd_lab) cmd_label(common, label_opts);
    if (*cmd_ser) cmd_series(common, series_opts);
    if (*cmd_mp) cmd_map(common, map_opts);
    if (*cmd_ac) cmd_acf(common, acf_opts);
    if (*cmd_ad) cmd_adf(common, adf_opts);
    if (*cmd_st) cmd_stationarize(common, stat_opts);
    if (*cmd_ft) cmd_fit(common, fit_opts);
    if (*cmd_fc) cmd_forecast(common, fc_opts);
    if (*cmd_ev) cmd_eval(common, eval_opts);
    if (*cmd_pp) cmd_pipeline(common, pipe_opts);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace pestpulse::cli
