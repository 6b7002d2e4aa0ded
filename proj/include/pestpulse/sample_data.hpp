#ifndef PESTPULSE_SAMPLE_DATA_HPP
#define PESTPULSE_SAMPLE_DATA_HPP

#include <cstdint>
#include <string>

namespace pestpulse::sampledata {

// Synthetic KCC-style corpus: a planted monthly aphid signal with period 12,
// smaller secondary pests, non-pest background queries, and a handful of
// rows that ingest should reject. Deterministic per seed.
struct CorpusSpec {
  std::uint64_t seed = 42;
  int start_year = 2015;
  int months = 72;
  int background_per_month = 35;
};

std::string kcc_csv(const CorpusSpec& spec);

// Gross cropped area table covering the sample districts for 2015-2020.
std::string area_csv();

// Reference pest lexicon (JSON).
std::string lexicon_json();

// Series-format CSV holding a positively shifted random walk; the bundled
// unit-root fixture for the adf subcommand.
std::string random_walk_series_csv(std::uint64_t seed, int n);

}  // namespace pestpulse::sampledata

#endif  // PESTPULSE_SAMPLE_DATA_HPP
