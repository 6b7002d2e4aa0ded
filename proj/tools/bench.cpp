// Compares the serial reference kernels against their OpenMP versions on
// synthetic data: corpus labelling, series binning, and the SARIMA grid.

#include <chrono>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "pestpulse/aggregate.hpp"
#include "pestpulse/ingest.hpp"
#include "pestpulse/lexicon.hpp"
#include "pestpulse/sample_data.hpp"
#include "pestpulse/sarima.hpp"

using namespace pestpulse;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

template <typename F>
double timed(F&& fn) {
  auto start = std::chrono::steady_clock::now();
  fn();
  return seconds_since(start);
}

void report(const char* kernel, double serial_s, double parallel_s,
            bool match) {
  std::printf("%-16s serial %8.3fs   parallel %8.3fs   speedup %5.2fx   %s\n",
              kernel, serial_s, parallel_s,
              parallel_s > 0 ? serial_s / parallel_s : 0.0,
              match ? "outputs match" : "OUTPUT MISMATCH");
}

}  // namespace

int main() {
#ifdef _OPENMP
  const int threads = omp_get_max_threads();
#else
  const int threads = 1;
#endif
  std::printf("pestpulse benchmark, %d thread(s)\n\n", threads);

  sampledata::CorpusSpec spec;
  spec.months = 72;
  spec.background_per_month = 1200;  // ~90k rows
  const std::string csv = sampledata::kcc_csv(spec);
  std::istringstream in(csv);
  auto [records, ingest_report] = ingest::parse_records(in, {});
  auto lex = lexicon::PestLexicon::parse_json(sampledata::lexicon_json());
  std::printf("corpus: %zu records\n\n", records.size());

  std::vector<lexicon::LabelledRecord> labelled_serial, labelled_parallel;
  double t_serial = timed([&] {
    labelled_serial = lexicon::label_corpus_serial(records, lex).first;
  });
  double t_parallel = timed([&] {
    labelled_parallel = lexicon::label_corpus(records, lex, threads).first;
  });
  report("label_corpus", t_serial, t_parallel,
         labelled_serial == labelled_parallel);

  agg::SeriesKey key;  // national, all pests
  agg::DateWindow window;
  agg::FrequencySeries series_serial, series_parallel;
  t_serial = timed([&] {
    for (int i = 0; i < 50; ++i)
      series_serial = agg::build_series_serial(labelled_serial, key,
                                               agg::Bin::Daily, window);
  });
  t_parallel = timed([&] {
    for (int i = 0; i < 50; ++i)
      series_parallel = agg::build_series(labelled_serial, key,
                                          agg::Bin::Daily, window, threads);
  });
  report("build_series", t_serial, t_parallel,
         series_serial.values == series_parallel.values);

  const auto sim = sarima::simulate({1, 0, 1, 1, 0, 1, 12},
                                    {{0.6}, {0.3}, {0.5}, {0.3}, 0.0}, 1.0,
                                    400, 7);
  sarima::GridSpec grid;
  grid.p_max = grid.q_max = 1;
  grid.P_max = grid.Q_max = 1;
  grid.d_max = grid.D_max = 0;
  grid.seasons = {12};
  sarima::GridResult grid_serial, grid_parallel;
  t_serial = timed([&] { grid_serial = sarima::grid_search_serial(sim, grid); });
  t_parallel = timed(
      [&] { grid_parallel = sarima::grid_search(sim, grid, {}, threads); });
  bool grid_match =
      grid_serial.leaderboard.size() == grid_parallel.leaderboard.size();
  for (std::size_t i = 0; grid_match && i < grid_serial.leaderboard.size();
       ++i)
    grid_match = grid_serial.leaderboard[i].order ==
                     grid_parallel.leaderboard[i].order &&
                 grid_serial.leaderboard[i].aic ==
                     grid_parallel.leaderboard[i].aic;
  report("grid_search", t_serial, t_parallel, grid_match);

  return 0;
}
