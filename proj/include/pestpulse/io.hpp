#ifndef PESTPULSE_IO_HPP
#define PESTPULSE_IO_HPP

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "pestpulse/aggregate.hpp"
#include "pestpulse/diagnostics.hpp"
#include "pestpulse/ingest.hpp"
#include "pestpulse/lexicon.hpp"
#include "pestpulse/sarima.hpp"

namespace pestpulse::io {

// Fixed-precision float formatting so identical runs emit identical bytes.
std::string format_value(double v);

// ---- labelled corpus: input columns + pest_id, matched_text, source,
// distance ----
void write_labelled_csv(std::ostream& out,
                        const std::vector<lexicon::LabelledRecord>& labelled,
                        const ingest::IngestConfig& config = {});
std::vector<lexicon::LabelledRecord> read_labelled_csv(
    std::istream& in, const ingest::IngestConfig& config = {});

// ---- frequency series: date, region_level, region, pest_id, value, unit ----
void write_series_csv(std::ostream& out, const agg::FrequencySeries& series);
agg::FrequencySeries read_series_csv(std::istream& in);

// ---- acf table: lag, r ----
void write_acf_csv(std::ostream& out, const std::vector<double>& r);

// ---- monthly profile: month, value ----
void write_profile_csv(std::ostream& out, const std::array<double, 12>& profile);

// ---- choropleth: region, value (+ JSON map variant) ----
void write_region_values_csv(std::ostream& out,
                             const std::vector<agg::RegionValue>& rows);
std::string region_values_json(const std::vector<agg::RegionValue>& rows);

// ---- reports ----
std::string ingest_report_json(const ingest::IngestReport& report);
std::string label_stats_json(const lexicon::LabelStats& stats);
std::string adf_result_json(const diag::AdfResult& result);
std::string metrics_json(const sarima::EvalMetrics& metrics);

// ---- transform record ----
std::string transform_record_json(const diag::TransformRecord& record);
diag::TransformRecord parse_transform_record(const std::string& text);

// ---- fitted model (order, coefficients, fit stats, transform record) ----
std::string model_json(const sarima::SarimaModel& model,
                       const diag::TransformRecord& record);
std::pair<sarima::SarimaModel, diag::TransformRecord> parse_model_json(
    const std::string& text);

// ---- forecast: step, date, point, se, lower, upper ----
void write_forecast_csv(std::ostream& out, const sarima::Forecast& forecast,
                        const std::vector<Date>& dates);
sarima::Forecast read_forecast_csv(std::istream& in);

// ---- grid leaderboard: p,d,q,P,D,Q,s,aic ----
void write_leaderboard_csv(std::ostream& out,
                           const std::vector<sarima::GridEntry>& leaderboard);

}  // namespace pestpulse::io

#endif  // PESTPULSE_IO_HPP
