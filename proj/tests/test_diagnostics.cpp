#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "pestpulse/diagnostics.hpp"
#include "pestpulse/errors.hpp"
#include "pestpulse/rng.hpp"
#include "support.hpp"

using namespace pestpulse;
using namespace pestpulse::diag;

namespace {

std::vector<double> gaussian_series(std::uint64_t seed, int n,
                                    double mu = 0.0, double sigma = 1.0) {
  SeededRng rng(seed);
  std::vector<double> out(static_cast<std::size_t>(n));
  for (double& v : out) v = mu + sigma * rng.gaussian();
  return out;
}

std::vector<double> random_walk(std::uint64_t seed, int n) {
  SeededRng rng(seed);
  std::vector<double> out;
  double level = 0.0;
  for (int i = 0; i < n; ++i) {
    level += rng.gaussian();
    out.push_back(level);
  }
  return out;
}

std::vector<double> ar1_series(std::uint64_t seed, int n, double phi) {
  SeededRng rng(seed);
  std::vector<double> out;
  double level = 0.0;
  for (int i = 0; i < n + 50; ++i) {
    level = phi * level + rng.gaussian();
    if (i >= 50) out.push_back(level);
  }
  return out;
}

}  // namespace

TEST_CASE("acf basics") {
  auto y = gaussian_series(3, 200);
  auto r = acf(y, 20);
  CHECK(r.size() == 21);
  CHECK(r[0] == 1.0);
  for (double v : r) CHECK(std::abs(v) <= 1.0 + 1e-12);
}

TEST_CASE("acf matches the double-loop oracle to 1e-12") {
  std::mt19937 gen(42);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int round = 0; round < 20; ++round) {
    std::vector<double> y(80 + gen() % 60);
    for (double& v : y) v = u(gen);
    auto mine = acf(y, 15);
    auto oracle = testsupport::acf_oracle(y, 15);
    for (std::size_t k = 0; k < mine.size(); ++k)
      CHECK(mine[k] == doctest::Approx(oracle[k]).epsilon(1e-12));
  }
}

TEST_CASE("acf of a period-12 sinusoid peaks at lags 12 and 24") {
  std::vector<double> y;
  for (int t = 0; t < 240; ++t)
    y.push_back(std::sin(2.0 * std::numbers::pi * t / 12.0));
  auto r = acf(y, 25);
  for (int k : {12, 24}) {
    const std::size_t i = static_cast<std::size_t>(k);
    CHECK(r[i] > r[i - 1]);
    CHECK(r[i] > r[i + 1]);
    CHECK(r[i] > 0.8);
  }
  // Closed form: r[k] tracks cos(2 pi k / 12).
  CHECK(r[6] < -0.8);
}

TEST_CASE("acf rejects constant series and bad lags") {
  std::vector<double> constant(50, 3.0);
  CHECK_THROWS_AS(acf(constant, 5), DataError);
  std::vector<double> y = {1, 2, 3};
  CHECK_THROWS_AS(acf(y, 3), DataError);
  CHECK_THROWS_AS(acf(y, 0), ValidationError);
}

TEST_CASE("log transform") {
  std::vector<double> y = {0.0, std::numbers::e - 1.0, 4.0};
  auto out = log_transform(y);
  CHECK(out[0] == 0.0);
  CHECK(out[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(out[2] == doctest::Approx(std::log(5.0)).epsilon(1e-12));

  std::vector<double> neg = {1.0, -0.5};
  CHECK_THROWS_AS(log_transform(neg), DataError);

  // Order preservation on random non-negative vectors.
  std::mt19937 gen(8);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  std::vector<double> v(50);
  for (double& x : v) x = u(gen);
  auto lv = log_transform(v);
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j)
      if (v[i] < v[j]) CHECK(lv[i] < lv[j]);
}

TEST_CASE("difference") {
  std::vector<double> y = {1, 2, 4, 7};
  CHECK(difference(y, 1) == std::vector<double>{1, 2, 3});

  std::vector<double> constant(10, 5.0);
  for (double v : difference(constant, 3)) CHECK(v == 0.0);

  std::vector<double> ramp;
  for (int i = 0; i < 20; ++i) ramp.push_back(2.0 * i + 1.0);
  for (double v : difference(ramp, 1)) CHECK(v == doctest::Approx(2.0));

  CHECK_THROWS_AS(difference(y, 4), DataError);
  CHECK_THROWS_AS(difference(y, 0), ValidationError);
}

TEST_CASE("rolling stats") {
  std::vector<double> y = {1, 2, 3, 4};
  auto stats = rolling_stats(y, 2);
  CHECK(stats.means == std::vector<double>{1.5, 2.5, 3.5});
  for (double s : stats.stds) CHECK(s == doctest::Approx(0.5));

  std::vector<double> constant(10, 7.0);
  auto cs = rolling_stats(constant, 4);
  for (double m : cs.means) CHECK(m == 7.0);
  for (double s : cs.stds) CHECK(s == 0.0);

  auto whole = rolling_stats(y, 4);
  CHECK(whole.means.size() == 1);
  CHECK(whole.means[0] == doctest::Approx(2.5));
  CHECK(whole.stds[0] == doctest::Approx(std::sqrt(1.25)));

  CHECK_THROWS_AS(rolling_stats(y, 5), DataError);
}

TEST_CASE("critical values reproduce the published finite-sample surface at "
          "n = 100") {
  auto cv = adf_critical_values(100);
  CHECK(cv[0] == doctest::Approx(-3.496).epsilon(0.003));
  CHECK(cv[1] == doctest::Approx(-2.890).epsilon(0.003));
  CHECK(cv[2] == doctest::Approx(-2.582).epsilon(0.003));
  CHECK(cv[0] < cv[1]);
  CHECK(cv[1] < cv[2]);
}

TEST_CASE("p-value surface reproduces published statistic/p pairs") {
  // Pairs verified against the constant-only response surface: the
  // asymptotic 5% and 1% points, and two reported test outcomes.
  CHECK(adf_pvalue(-2.86) == doctest::Approx(0.05).epsilon(0.01));
  CHECK(adf_pvalue(-3.43) == doctest::Approx(0.01).epsilon(0.02));
  CHECK(adf_pvalue(-5.0867) == doctest::Approx(0.000015).epsilon(0.05));
  CHECK(adf_pvalue(-3.217) == doctest::Approx(0.019).epsilon(0.03));
  CHECK(adf_pvalue(3.0) == 1.0);
  CHECK(adf_pvalue(-20.0) == 0.0);
}

TEST_CASE("adf statistic is invariant under affine scaling") {
  auto y = ar1_series(5, 300, 0.6);
  auto base = adf_test(y, LagPolicy::fixed(4));
  std::vector<double> scaled;
  for (double v : y) scaled.push_back(3.5 * v + 11.0);
  auto other = adf_test(scaled, LagPolicy::fixed(4));
  CHECK(other.statistic == doctest::Approx(base.statistic).epsilon(1e-9));
  CHECK(other.lags_used == base.lags_used);
  CHECK(other.n_obs == base.n_obs);
}

TEST_CASE("adf result fields are internally consistent") {
  auto y = ar1_series(6, 250, 0.5);
  auto result = adf_test(y);
  CHECK(result.stationary_at_5pct == (result.statistic < result.crit_5pct));
  CHECK(result.crit_1pct < result.crit_5pct);
  CHECK(result.crit_5pct < result.crit_10pct);
  CHECK(result.p_value >= 0.0);
  CHECK(result.p_value <= 1.0);
  CHECK(result.n_obs == 250 - result.lags_used - 1);
  CHECK_FALSE(result.log_transform_applied);
}

TEST_CASE("adf errors: too short, constant input") {
  std::vector<double> shorty(15, 1.0);
  CHECK_THROWS_AS(adf_test(shorty), DataError);
  std::vector<double> constant(60, 2.0);
  CHECK_THROWS_AS(adf_test(constant), DataError);
  auto y = ar1_series(7, 60, 0.5);
  CHECK_THROWS_AS(adf_test(y, LagPolicy::fixed(45)), DataError);
}

TEST_CASE("adf power and size on short Monte Carlo batches") {
  int reject_ar = 0, reject_rw = 0;
  const int reps = 200;
  for (int i = 0; i < reps; ++i) {
    if (adf_test(ar1_series(1000 + i, 500, 0.5)).stationary_at_5pct)
      ++reject_ar;
    if (adf_test(random_walk(2000 + i, 500)).stationary_at_5pct)
      ++reject_rw;
  }
  CHECK(reject_ar >= static_cast<int>(0.95 * reps));
  CHECK(reject_rw >= 2);   // ~5% of 200, loose bounds for the small batch
  CHECK(reject_rw <= 22);
}

TEST_CASE("transform record inverts exactly") {
  std::mt19937 gen(10);
  std::uniform_real_distribution<double> u(0.0, 60.0);
  for (int round = 0; round < 50; ++round) {
    std::vector<double> y(40 + gen() % 80);
    for (double& v : y) v = u(gen);

    TransformRecord record;
    std::vector<double> cur = log_transform(y);
    record.log_applied = true;
    cur = record.push_difference(cur, 1);
    if (round % 2 == 0) cur = record.push_difference(cur, 12);

    auto back = record.invert(cur);
    REQUIRE(back.size() == y.size());
    for (std::size_t i = 0; i < y.size(); ++i)
      CHECK(back[i] == doctest::Approx(y[i]).epsilon(1e-9));
  }
}

TEST_CASE("continuation inversion agrees with transforming the longer "
          "series") {
  std::mt19937 gen(20);
  std::uniform_real_distribution<double> u(0.0, 30.0);
  for (int round = 0; round < 30; ++round) {
    const std::size_t n = 60, h = 12;
    std::vector<double> full(n + h);
    for (double& v : full) v = u(gen);
    std::vector<double> head(full.begin(),
                             full.begin() + static_cast<std::ptrdiff_t>(n));

    // Record built while transforming the head only.
    TransformRecord record;
    std::vector<double> cur = log_transform(head);
    record.log_applied = true;
    cur = record.push_difference(cur, 1);
    cur = record.push_difference(cur, 7);

    // The same transforms applied to the full series by hand.
    std::vector<double> full_t = log_transform(full);
    full_t = difference(full_t, 1);
    full_t = difference(full_t, 7);

    std::vector<double> continuation(full_t.begin() +
                                         static_cast<std::ptrdiff_t>(cur.size()),
                                     full_t.end());
    auto restored = record.invert_continuation(cur, continuation);
    REQUIRE(restored.size() == h);
    for (std::size_t i = 0; i < h; ++i)
      CHECK(restored[i] == doctest::Approx(full[n + i]).epsilon(1e-9));
  }
}

TEST_CASE("stationarize leaves white noise untouched") {
  auto y = gaussian_series(30, 200, 10.0, 2.0);
  auto result = stationarize(y);
  CHECK(result.record.empty());
  CHECK(result.values == y);
  CHECK(result.adf.stationary_at_5pct);
}

TEST_CASE("stationarize differences random walks, usually once") {
  int single_diff = 0;
  const int reps = 50;
  for (int i = 0; i < reps; ++i) {
    std::vector<double> y = random_walk(500 + i, 300);
    for (double& v : y) v += 200.0;  // keep counts-like positivity
    auto result = stationarize(y);
    CHECK(result.adf.stationary_at_5pct);
    if (result.record.diffs.size() == 1) ++single_diff;
  }
  CHECK(single_diff >= static_cast<int>(0.95 * reps));
}

TEST_CASE("stationarize handles exponential growth via log then difference") {
  SeededRng rng(77);
  std::vector<double> y;
  for (int t = 0; t < 150; ++t)
    y.push_back(std::exp(0.05 * t) * (1.0 + 0.02 * rng.gaussian()));
  auto result = stationarize(y);
  CHECK(result.adf.stationary_at_5pct);
  CHECK(result.record.log_applied);
  CHECK(result.record.diffs.size() >= 1);
  CHECK(result.adf.log_transform_applied);

  auto back = result.record.invert(result.values);
  REQUIRE(back.size() == y.size());
  for (std::size_t i = 0; i < y.size(); ++i)
    CHECK(back[i] == doctest::Approx(y[i]).epsilon(1e-9));
}

TEST_CASE("stationarize is idempotent on its own output") {
  auto y = random_walk(88, 250);
  for (double& v : y) v += 150.0;
  auto first = stationarize(y);
  auto second = stationarize(first.values);
  CHECK(second.record.empty());
  CHECK(second.values == first.values);
}

TEST_CASE("stationarize reports failure with the last test attached") {
  auto y = random_walk(3, 200);
  for (double& v : y) v += 100.0;
  try {
    stationarize(y, LagPolicy::aic_auto(), 0);
    FAIL("expected NonStationaryError");
  } catch (const NonStationaryError& e) {
    CHECK_FALSE(e.last_adf.stationary_at_5pct);
  }
}

TEST_CASE("stationarize needs 30 observations") {
  std::vector<double> y(20, 1.0);
  CHECK_THROWS_AS(stationarize(y), DataError);
}

TEST_CASE("seasonal period candidates find a planted period") {
  SeededRng rng(12);
  std::vector<double> y;
  for (int t = 0; t < 144; ++t)
    y.push_back(20.0 + 10.0 * std::sin(2.0 * std::numbers::pi * t / 12.0) +
                rng.gaussian());
  auto candidates = seasonal_period_candidates(y);
  REQUIRE(!candidates.empty());
  CHECK(candidates[0] == 12);
  // Harmonics at 24 and 36 are filtered.
  for (int c : candidates)
    if (c != 12) CHECK(c % 12 != 0);
  CHECK(seasonal_period_candidates(gaussian_series(1, 6), 3).empty());
}
