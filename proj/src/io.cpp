#include "pestpulse/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "pestpulse/csv.hpp"
#include "pestpulse/errors.hpp"
#include "pestpulse/text.hpp"

namespace pestpulse::io {

using nlohmann::json;

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

namespace {

double parse_double(const std::string& text, const char* what) {
  try {
    std::size_t used = 0;
    double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (...) {
    throw DataError(std::string("bad numeric value for ") + what + ": '" +
                    text + "'");
  }
}

int parse_int_field(const std::string& text, const char* what) {
  int v = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || p != text.data() + text.size())
    throw DataError(std::string("bad integer value for ") + what + ": '" +
                    text + "'");
  return v;
}

}  // namespace

void write_labelled_csv(std::ostream& out,
                        const std::vector<lexicon::LabelledRecord>& labelled,
                        const ingest::IngestConfig& config) {
  std::vector<std::string> row;
  for (const auto& name : ingest::default_columns())
    row.push_back(config.header_for(name));
  row.push_back("pest_id");
  row.push_back("matched_text");
  row.push_back("source");
  row.push_back("distance");
  write_csv_row(out, row);

  for (const auto& [rec, label] : labelled) {
    row.clear();
    row.push_back(ingest::season_name(rec.season));
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
    row.push_back(label.pest_id);
    row.push_back(label.matched_text);
    row.push_back(lexicon::label_source_name(label.source));
    row.push_back(std::to_string(label.distance));
    write_csv_row(out, row);
  }
}

std::vector<lexicon::LabelledRecord> read_labelled_csv(
    std::istream& in, const ingest::IngestConfig& /*config*/) {
  CsvReader reader(in);
  std::vector<std::string> fields;
  std::string error;

  auto status = reader.next(fields, error);
  if (status != CsvReader::RowStatus::Ok)
    throw DataError("labelled csv: unreadable header");

  const std::size_t base = ingest::default_columns().size();
  if (fields.size() != base + 4)
    throw DataError("labelled csv: unexpected column count");

  std::vector<lexicon::LabelledRecord> out;
  std::size_t row_no = 1;
  while (true) {
    status = reader.next(fields, error);
    if (status == CsvReader::RowStatus::Eof) break;
    ++row_no;
    if (status != CsvReader::RowStatus::Ok || fields.size() != base + 4)
      throw DataError("labelled csv: malformed row " + std::to_string(row_no));

    ingest::KccRecord rec;
    rec.season = ingest::parse_season(fields[0]);
    rec.sector = fields[1];
    rec.category = fields[2];
    rec.crop = fields[3];
    rec.query_type = fields[4];
    rec.query_text = fields[5];
    rec.answer_text = fields[6];
    rec.state = canonical_region(fields[7]);
    rec.district = canonical_region(fields[8]);
    rec.block = canonical_region(fields[9]);
    auto ts = parse_timestamp(fields[10]);
    if (!ts)
      throw DataError("labelled csv: bad timestamp at row " +
                      std::to_string(row_no));
    rec.created_on = *ts;

    lexicon::PestLabel label;
    label.pest_id = fields[base + 0];
    label.matched_text = fields[base + 1];
    label.source = fields[base + 2] == "answer" ? lexicon::LabelSource::Answer
                                                : lexicon::LabelSource::Question;
    label.distance = parse_int_field(fields[base + 3], "distance");
    out.emplace_back(std::move(rec), std::move(label));
  }
  return out;
}

void write_series_csv(std::ostream& out, const agg::FrequencySeries& series) {
  std::vector<std::string> row = {"date",    "region_level", "region",
                                  "pest_id", "value",        "unit"};
  write_csv_row(out, row);
  const std::string level = agg::region_level_name(series.key.level);
  const std::string pest =
      series.key.pest_id.empty() ? "all" : series.key.pest_id;
  for (std::size_t i = 0; i < series.values.size(); ++i) {
    row[0] = format_date(series.date_at(i));
    row[1] = level;
    row[2] = series.key.region_name;
    row[3] = pest;
    row[4] = format_value(series.values[i]);
    row[5] = series.unit;
    write_csv_row(out, row);
  }
}

agg::FrequencySeries read_series_csv(std::istream& in) {
  CsvReader reader(in);
  std::vector<std::string> fields;
  std::string error;

  auto status = reader.next(fields, error);
  if (status != CsvReader::RowStatus::Ok || fields.size() != 6)
    throw DataError("series csv: expected header "
                    "date,region_level,region,pest_id,value,unit");

  agg::FrequencySeries series;
  std::vector<Date> dates;
  std::size_t row_no = 1;
  while (true) {
    status = reader.next(fields, error);
    if (status == CsvReader::RowStatus::Eof) break;
    ++row_no;
    if (status != CsvReader::RowStatus::Ok || fields.size() != 6)
      throw DataError("series csv: malformed row " + std::to_string(row_no));
    auto date = parse_date(fields[0]);
    if (!date)
      throw DataError("series csv: bad date at row " + std::to_string(row_no));
    if (dates.empty()) {
      try {
        series.key.level = agg::parse_region_level(fields[1]);
      } catch (const ValidationError& e) {
        throw DataError(std::string("series csv: ") + e.what());
      }
      series.key.region_name = fields[2];
      series.key.pest_id = fields[3] == "all" ? "" : fields[3];
      series.unit = fields[5];
      series.normalized = fields[5] != "queries";
    }
    dates.push_back(*date);
    series.values.push_back(parse_double(fields[4], "value"));
  }
  if (dates.empty()) throw DataError("series csv: no data rows");

  series.start = dates.front();
  series.bin = agg::Bin::Monthly;
  if (dates.size() >= 2) {
    const std::int64_t gap = serial_day(dates[1]) - serial_day(dates[0]);
    series.bin = gap == 1 ? agg::Bin::Daily : agg::Bin::Monthly;
  }
  // The zero-gap invariant: row i must sit at bin i.
  for (std::size_t i = 0; i < dates.size(); ++i)
    if (dates[i] != series.date_at(i))
      throw DataError("series csv: rows are not contiguous calendar bins "
                      "(row " + std::to_string(i + 2) + ")");
  return series;
}

void write_acf_csv(std::ostream& out, const std::vector<double>& r) {
  std::vector<std::string> row = {"lag", "r"};
  write_csv_row(out, row);
  for (std::size_t k = 0; k < r.size(); ++k) {
    row[0] = std::to_string(k);
    row[1] = format_value(r[k]);
    write_csv_row(out, row);
  }
}

void write_profile_csv(std::ostream& out,
                       const std::array<double, 12>& profile) {
  std::vector<std::string> row = {"month", "value"};
  write_csv_row(out, row);
  for (int m = 0; m < 12; ++m) {
    row[0] = std::to_string(m + 1);
    row[1] = format_value(profile[static_cast<std::size_t>(m)]);
    write_csv_row(out, row);
  }
}

void write_region_values_csv(std::ostream& out,
                             const std::vector<agg::RegionValue>& rows) {
  std::vector<std::string> row = {"region", "value"};
  write_csv_row(out, row);
  for (const auto& rv : rows) {
    row[0] = rv.region;
    row[1] = format_value(rv.value);
    write_csv_row(out, row);
  }
}

std::string region_values_json(const std::vector<agg::RegionValue>& rows) {
  json doc = json::object();
  for (const auto& rv : rows) doc[rv.region] = rv.value;
  return doc.dump(2) + "\n";
}

std::string ingest_report_json(const ingest::IngestReport& report) {
  json doc;
  doc["total_rows"] = report.total_rows;
  doc["accepted"] = report.accepted;
  doc["rejected_missing_field"] = report.rejected_missing_field;
  doc["rejected_bad_timestamp"] = report.rejected_bad_timestamp;
  doc["rejected_out_of_window"] = report.rejected_out_of_window;
  doc["rejected_malformed_row"] = report.rejected_malformed_row;
  doc["preprocessor_failures"] = report.preprocessor_failures;
  return doc.dump(2) + "\n";
}

std::string label_stats_json(const lexicon::LabelStats& stats) {
  json doc;
  doc["labelled"] = stats.labelled;
  doc["total"] = stats.total;
  doc["fraction"] = stats.fraction();
  return doc.dump(2) + "\n";
}

std::string adf_result_json(const diag::AdfResult& result) {
  json doc;
  doc["statistic"] = result.statistic;
  doc["p_value"] = result.p_value;
  doc["lags_used"] = result.lags_used;
  doc["n_obs"] = result.n_obs;
  doc["critical_values"]["1%"] = result.crit_1pct;
  doc["critical_values"]["5%"] = result.crit_5pct;
  doc["critical_values"]["10%"] = result.crit_10pct;
  doc["log_transform_applied"] = result.log_transform_applied;
  doc["stationary_at_5pct"] = result.stationary_at_5pct;
  return doc.dump(2) + "\n";
}

std::string metrics_json(const sarima::EvalMetrics& metrics) {
  json doc;
  doc["rmse"] = metrics.rmse;
  doc["mse"] = metrics.mse;
  doc["mean_se"] = metrics.mean_se;
  doc["ci_coverage"] = metrics.ci_coverage;
  return doc.dump(2) + "\n";
}

namespace {

json transform_record_to_json(const diag::TransformRecord& record) {
  json doc;
  doc["log_applied"] = record.log_applied;
  doc["differences"] = json::array();
  for (const auto& pass : record.diffs) {
    json p;
    p["lag"] = pass.lag;
    p["initial_values"] = pass.initial;
    doc["differences"].push_back(p);
  }
  return doc;
}

diag::TransformRecord transform_record_from_json(const json& doc) {
  diag::TransformRecord record;
  record.log_applied = doc.value("log_applied", false);
  if (doc.contains("differences")) {
    for (const auto& p : doc.at("differences")) {
      diag::DiffPass pass;
      pass.lag = p.at("lag").get<int>();
      pass.initial = p.at("initial_values").get<std::vector<double>>();
      record.diffs.push_back(std::move(pass));
    }
  }
  return record;
}

}  // namespace

std::string transform_record_json(const diag::TransformRecord& record) {
  return transform_record_to_json(record).dump(2) + "\n";
}

diag::TransformRecord parse_transform_record(const std::string& text) {
  try {
    return transform_record_from_json(json::parse(text));
  } catch (const json::exception& e) {
    throw DataError(std::string("transform record: invalid JSON: ") + e.what());
  }
}

std::string model_json(const sarima::SarimaModel& model,
                       const diag::TransformRecord& record) {
  json doc;
  doc["order"] = {{"p", model.order.p}, {"d", model.order.d},
                  {"q", model.order.q}, {"P", model.order.P},
                  {"D", model.order.D}, {"Q", model.order.Q},
                  {"s", model.order.s}};
  doc["ar"] = model.ar;
  doc["ma"] = model.ma;
  doc["sar"] = model.sar;
  doc["sma"] = model.sma;
  doc["intercept"] = model.intercept;
  doc["sigma2"] = model.sigma2;
  doc["loglik"] = model.loglik;
  doc["aic"] = model.aic;
  doc["n_fit"] = model.n_fit;
  doc["converged"] = model.converged;
  doc["transform"] = transform_record_to_json(record);
  return doc.dump(2) + "\n";
}

std::pair<sarima::SarimaModel, diag::TransformRecord> parse_model_json(
    const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("model json: invalid JSON: ") + e.what());
  }
  try {
    sarima::SarimaModel model;
    const auto& o = doc.at("order");
    model.order = {o.at("p").get<int>(), o.at("d").get<int>(),
                   o.at("q").get<int>(), o.at("P").get<int>(),
                   o.at("D").get<int>(), o.at("Q").get<int>(),
                   o.at("s").get<int>()};
    model.ar = doc.at("ar").get<std::vector<double>>();
    model.ma = doc.at("ma").get<std::vector<double>>();
    model.sar = doc.at("sar").get<std::vector<double>>();
    model.sma = doc.at("sma").get<std::vector<double>>();
    model.intercept = doc.at("intercept").get<double>();
    model.sigma2 = doc.at("sigma2").get<double>();
    model.loglik = doc.at("loglik").get<double>();
    model.aic = doc.at("aic").get<double>();
    model.n_fit = doc.at("n_fit").get<int>();
    model.converged = doc.at("converged").get<bool>();
    diag::TransformRecord record;
    if (doc.contains("transform"))
      record = transform_record_from_json(doc.at("transform"));
    return {std::move(model), std::move(record)};
  } catch (const json::exception& e) {
    throw DataError(std::string("model json: missing or bad field: ") +
                    e.what());
  }
}

void write_forecast_csv(std::ostream& out, const sarima::Forecast& forecast,
                        const std::vector<Date>& dates) {
  if (dates.size() != forecast.point.size())
    throw ValidationError("forecast csv: date count mismatch");
  std::vector<std::string> row = {"step", "date",  "point",
                                  "se",   "lower", "upper"};
  write_csv_row(out, row);
  for (std::size_t i = 0; i < forecast.point.size(); ++i) {
    row[0] = std::to_string(i + 1);
    row[1] = format_date(dates[i]);
    row[2] = format_value(forecast.point[i]);
    row[3] = format_value(forecast.se[i]);
    row[4] = format_value(forecast.lower[i]);
    row[5] = format_value(forecast.upper[i]);
    write_csv_row(out, row);
  }
}

sarima::Forecast read_forecast_csv(std::istream& in) {
  CsvReader reader(in);
  std::vector<std::string> fields;
  std::string error;

  auto status = reader.next(fields, error);
  if (status != CsvReader::RowStatus::Ok || fields.size() != 6)
    throw DataError("forecast csv: expected header "
                    "step,date,point,se,lower,upper");

  sarima::Forecast fc;
  std::size_t row_no = 1;
  while (true) {
    status = reader.next(fields, error);
    if (status == CsvReader::RowStatus::Eof) break;
    ++row_no;
    if (status != CsvReader::RowStatus::Ok || fields.size() != 6)
      throw DataError("forecast csv: malformed row " + std::to_string(row_no));
    fc.point.push_back(parse_double(fields[2], "point"));
    fc.se.push_back(parse_double(fields[3], "se"));
    fc.lower.push_back(parse_double(fields[4], "lower"));
    fc.upper.push_back(parse_double(fields[5], "upper"));
  }
  fc.horizon = static_cast<int>(fc.point.size());
  return fc;
}

void write_leaderboard_csv(std::ostream& out,
                           const std::vector<sarima::GridEntry>& leaderboard) {
  std::vector<std::string> row = {"p", "d", "q", "P", "D", "Q", "s", "aic"};
  write_csv_row(out, row);
  for (const auto& entry : leaderboard) {
    row[0] = std::to_string(entry.order.p);
    row[1] = std::to_string(entry.order.d);
    row[2] = std::to_string(entry.order.q);
    row[3] = std::to_string(entry.order.P);
    row[4] = std::to_string(entry.order.D);
    row[5] = std::to_string(entry.order.Q);
    row[6] = std::to_string(entry.order.s);
    row[7] = format_value(entry.aic);
    write_csv_row(out, row);
  }
}

}  // namespace pestpulse::io
