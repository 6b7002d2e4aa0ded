#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "pestpulse/errors.hpp"
#include "pestpulse/io.hpp"
#include "pestpulse/rng.hpp"
#include "pestpulse/sarima.hpp"
#include "pestpulse/stats.hpp"
#include "support.hpp"

using namespace pestpulse;
using namespace pestpulse::sarima;

namespace {

SarimaModel handmade_model(const SarimaOrder& order,
                           const SarimaCoeffs& coeffs, double sigma2) {
  SarimaModel model;
  model.order = order;
  model.ar = coeffs.ar;
  model.ma = coeffs.ma;
  model.sar = coeffs.sar;
  model.sma = coeffs.sma;
  model.intercept = coeffs.intercept;
  model.sigma2 = sigma2;
  model.converged = true;
  return model;
}

}  // namespace

TEST_CASE("order validation") {
  CHECK_THROWS_AS((SarimaOrder{1, 2, 1, 0, 2, 0, 12}.validate()),
                  ValidationError);  // d + D > 3
  CHECK_THROWS_AS((SarimaOrder{0, 0, 0, 1, 0, 0, 1}.validate()),
                  ValidationError);  // seasonal order without s >= 2
  CHECK_NOTHROW((SarimaOrder{2, 1, 2, 1, 1, 1, 12}.validate()));
  CHECK_NOTHROW((SarimaOrder{0, 0, 0, 0, 0, 0, 0}.validate()));
}

TEST_CASE("unconstrained transform round-trips coefficients to 1e-10") {
  std::mt19937 gen(2024);
  std::uniform_real_distribution<double> u(-0.95, 0.95);
  for (int round = 0; round < 200; ++round) {
    const std::size_t order = 1 + gen() % 3;
    // Build a guaranteed-stationary polynomial from random pacf values.
    std::vector<double> pacf(order);
    for (double& v : pacf) v = u(gen);
    std::vector<double> unconstrained(order);
    for (std::size_t i = 0; i < order; ++i)
      unconstrained[i] = std::atanh(pacf[i]);

    auto ar = ar_from_unconstrained(unconstrained);
    CHECK(ar_poly_stationary(ar));
    auto back = unconstrained_from_ar(ar);
    auto ar2 = ar_from_unconstrained(back);
    for (std::size_t i = 0; i < order; ++i)
      CHECK(ar2[i] == doctest::Approx(ar[i]).epsilon(1e-10));

    auto ma = ma_from_unconstrained(unconstrained);
    CHECK(ma_poly_invertible(ma));
    auto mb = unconstrained_from_ma(ma);
    auto ma2 = ma_from_unconstrained(mb);
    for (std::size_t i = 0; i < order; ++i)
      CHECK(ma2[i] == doctest::Approx(ma[i]).epsilon(1e-10));
  }
}

TEST_CASE("stationarity check matches the pacf domain") {
  CHECK(ar_poly_stationary(std::vector<double>{0.5}));
  CHECK_FALSE(ar_poly_stationary(std::vector<double>{1.01}));
  CHECK(ar_poly_stationary(std::vector<double>{0.5, -0.3}));
  CHECK_FALSE(ar_poly_stationary(std::vector<double>{0.9, 0.2}));  // sum > 1
  CHECK(ma_poly_invertible(std::vector<double>{-0.4}));
  CHECK_FALSE(ma_poly_invertible(std::vector<double>{-1.2}));
}

TEST_CASE("css objective equals the closed form for the white-noise model") {
  SeededRng rng(5);
  std::vector<double> y(400);
  for (double& v : y) v = 3.0 + 2.0 * rng.gaussian();
  const double ybar = mean(y);
  const double var = population_variance(y);

  SarimaCoeffs coeffs;
  coeffs.intercept = ybar;
  const double ll = css_objective(coeffs, y, {0, 0, 0, 0, 0, 0, 0});
  const double expected =
      -0.5 * static_cast<double>(y.size()) *
      (std::log(2.0 * std::numbers::pi * var) + 1.0);
  CHECK(ll == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("css residual variance approaches the truth for a known AR(1)") {
  const auto y = simulate({1, 0, 0, 0, 0, 0, 0}, {{0.7}, {}, {}, {}, 0.0},
                          1.5, 5000, 99);
  SarimaCoeffs coeffs;
  coeffs.ar = {0.7};
  const double ll = css_objective(coeffs, y, {1, 0, 0, 0, 0, 0, 0});
  // Solve the profiled sigma^2 back out of the log-likelihood.
  const double n = static_cast<double>(y.size());
  const double sigma2 =
      std::exp(-2.0 * ll / n - std::log(2.0 * std::numbers::pi) - 1.0);
  CHECK(sigma2 == doctest::Approx(1.5 * 1.5).epsilon(0.05));
}

TEST_CASE("intercept-only fit recovers the sample mean exactly") {
  SeededRng rng(7);
  std::vector<double> y(120);
  for (double& v : y) v = 5.5 + rng.gaussian();
  auto model = fit(y, {0, 0, 0, 0, 0, 0, 0});
  CHECK(model.converged);
  CHECK(model.intercept == mean(y));
  CHECK(model.n_fit == 120);
  CHECK(model.aic ==
        doctest::Approx(-2.0 * model.loglik + 2.0 * 2.0).epsilon(1e-12));
}

TEST_CASE("fit recovers ARMA(1,1) coefficients on simulated data") {
  const auto y = simulate({1, 0, 1, 0, 0, 0, 0},
                          {{0.6}, {0.3}, {}, {}, 0.0}, 1.0, 2000, 11);
  auto model = fit(y, {1, 0, 1, 0, 0, 0, 0});
  CHECK(model.converged);
  CHECK(model.ar[0] == doctest::Approx(0.6).epsilon(0.18));
  CHECK(model.ma[0] == doctest::Approx(0.3).epsilon(0.35));
  CHECK(std::abs(model.ar[0] - 0.6) < 0.1);
  CHECK(std::abs(model.ma[0] - 0.3) < 0.1);
  CHECK(model_stationary_invertible(model));
}

TEST_CASE("fit recovers seasonal AR coefficients across seeds") {
  const SarimaOrder order{1, 0, 0, 1, 0, 0, 12};
  int good = 0;
  for (int seed = 0; seed < 20; ++seed) {
    const auto y = simulate(order, {{0.6}, {}, {0.5}, {}, 0.0}, 1.0, 2000,
                            700 + static_cast<std::uint64_t>(seed));
    auto model = fit(y, order);
    if (std::abs(model.ar[0] - 0.6) <= 0.1 &&
        std::abs(model.sar[0] - 0.5) <= 0.1)
      ++good;
    CHECK(model_stationary_invertible(model));
  }
  CHECK(good >= 18);
}

TEST_CASE("fit rejects series shorter than the order requires") {
  std::vector<double> y(12, 1.0);
  CHECK_THROWS_AS(fit(y, {2, 1, 2, 1, 1, 1, 12}), DataError);
}

TEST_CASE("simulate") {
  SUBCASE("all-zero coefficients reproduce the seeded gaussian stream") {
    auto y = simulate({0, 0, 0, 0, 0, 0, 0}, {}, 1.0, 50, 424242);
    SeededRng rng(424242);
    for (double v : y) CHECK(v == rng.gaussian());
  }
  SUBCASE("same seed, same series") {
    auto a = simulate({1, 0, 1, 0, 0, 0, 0}, {{0.5}, {0.2}, {}, {}, 1.0}, 1.0,
                      200, 9);
    auto b = simulate({1, 0, 1, 0, 0, 0, 0}, {{0.5}, {0.2}, {}, {}, 1.0}, 1.0,
                      200, 9);
    CHECK(a == b);
  }
  SUBCASE("AR(1) with phi 0.9 shows the theoretical lag-1 autocorrelation") {
    auto y = simulate({1, 0, 0, 0, 0, 0, 0}, {{0.9}, {}, {}, {}, 0.0}, 1.0,
                      10000, 31);
    double num = 0.0, den = 0.0;
    const double m = mean(y);
    for (std::size_t t = 0; t + 1 < y.size(); ++t)
      num += (y[t] - m) * (y[t + 1] - m);
    for (double v : y) den += (v - m) * (v - m);
    CHECK(num / den == doctest::Approx(0.9).epsilon(0.025));
  }
  SUBCASE("explosive coefficients are rejected") {
    CHECK_THROWS_AS(
        simulate({1, 0, 0, 0, 0, 0, 0}, {{1.05}, {}, {}, {}, 0.0}, 1.0, 100,
                 1),
        DataError);
  }
  SUBCASE("coefficient counts must match the order") {
    CHECK_THROWS_AS(
        simulate({2, 0, 0, 0, 0, 0, 0}, {{0.5}, {}, {}, {}, 0.0}, 1.0, 100, 1),
        ValidationError);
  }
}

TEST_CASE("psi weights and forecast standard errors for AR(1)") {
  auto model = handmade_model({1, 0, 0, 0, 0, 0, 0},
                              {{0.5}, {}, {}, {}, 0.0}, 1.0);
  auto psi = psi_weights(model, 4);
  CHECK(psi[0] == doctest::Approx(1.0));
  CHECK(psi[1] == doctest::Approx(0.5));
  CHECK(psi[2] == doctest::Approx(0.25));
  CHECK(psi[3] == doctest::Approx(0.125));

  std::vector<double> history = {0.3, -0.2, 0.5, 0.1, -0.4, 0.2};
  auto fc = forecast(model, history, 3);
  CHECK(fc.se[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(fc.se[1] == doctest::Approx(std::sqrt(1.25)).epsilon(1e-6));
  CHECK(fc.se[2] == doctest::Approx(std::sqrt(1.3125)).epsilon(1e-6));

  // Interval half-width is the normal quantile times the standard error.
  const double zq = normal_quantile(0.975);
  for (std::size_t h = 0; h < 3; ++h) {
    CHECK(fc.upper[h] - fc.point[h] ==
          doctest::Approx(zq * fc.se[h]).epsilon(1e-10));
    CHECK(fc.point[h] - fc.lower[h] ==
          doctest::Approx(zq * fc.se[h]).epsilon(1e-10));
  }
}

TEST_CASE("intercept-only forecasts are flat with constant se") {
  SeededRng rng(3);
  std::vector<double> y(80);
  for (double& v : y) v = 4.0 + 0.5 * rng.gaussian();
  auto model = fit(y, {0, 0, 0, 0, 0, 0, 0});
  auto fc = forecast(model, y, 5);
  for (double p : fc.point) CHECK(p == doctest::Approx(model.intercept));
  for (double s : fc.se)
    CHECK(s == doctest::Approx(std::sqrt(model.sigma2)).epsilon(1e-12));
  for (std::size_t h = 0; h < fc.point.size(); ++h) {
    CHECK(fc.lower[h] <= fc.point[h]);
    CHECK(fc.point[h] <= fc.upper[h]);
  }
}

TEST_CASE("stationary forecasts converge to the process mean") {
  const auto y = simulate({1, 0, 0, 0, 0, 0, 0}, {{0.8}, {}, {}, {}, 10.0},
                          1.0, 800, 21);
  auto model = fit(y, {1, 0, 0, 0, 0, 0, 0});
  auto fc = forecast(model, y, 200);
  CHECK(fc.point.back() == doctest::Approx(model.intercept).epsilon(1e-3));
  // se is non-decreasing in the horizon.
  for (std::size_t h = 1; h < fc.se.size(); ++h)
    CHECK(fc.se[h] >= fc.se[h - 1] - 1e-12);
}

TEST_CASE("forecast validates the horizon and interval level") {
  auto model = handmade_model({0, 0, 0, 0, 0, 0, 0}, {}, 1.0);
  std::vector<double> y = {1.0, 2.0, 3.0};
  CHECK_THROWS_AS(forecast(model, y, 0), ValidationError);
  CHECK_THROWS_AS(forecast(model, y, 5, 1.5), ValidationError);
}

TEST_CASE("differenced models integrate forecasts back to the data scale") {
  // Random walk with drift: ARIMA(0,1,0) with intercept = mean step.
  SeededRng rng(15);
  std::vector<double> y;
  double level = 100.0;
  for (int t = 0; t < 300; ++t) {
    level += 0.5 + 0.1 * rng.gaussian();
    y.push_back(level);
  }
  auto model = fit(y, {0, 1, 0, 0, 0, 0, 0});
  CHECK(model.intercept == doctest::Approx(0.5).epsilon(0.1));
  auto fc = forecast(model, y, 10);
  // Point forecasts continue the drift from the last observation.
  for (int h = 1; h <= 10; ++h)
    CHECK(fc.point[static_cast<std::size_t>(h - 1)] ==
          doctest::Approx(y.back() + h * model.intercept).epsilon(0.01));
  // Random-walk psi weights are all one: se grows like sqrt(h).
  CHECK(fc.se[3] == doctest::Approx(2.0 * fc.se[0]).epsilon(1e-9));
}

TEST_CASE("forecast maps through an outer transform record endpoint-wise") {
  // Original scale series, log + diff applied by hand.
  SeededRng rng(44);
  std::vector<double> raw;
  double level = 50.0;
  for (int t = 0; t < 200; ++t) {
    level = std::max(1.0, level + rng.gaussian());
    raw.push_back(level);
  }
  diag::TransformRecord record;
  std::vector<double> transformed = diag::log_transform(raw);
  record.log_applied = true;
  transformed = record.push_difference(transformed, 1);

  auto model = fit(transformed, {1, 0, 0, 0, 0, 0, 0});
  auto fc = forecast(model, transformed, 6, 0.95, &record);
  for (std::size_t h = 0; h < 6; ++h) {
    CHECK(fc.lower[h] <= fc.point[h]);
    CHECK(fc.point[h] <= fc.upper[h]);
    CHECK(fc.point[h] > 0.0);  // back on the count scale
  }

  // The first point forecast must equal the hand-integrated value.
  auto fc_model = forecast(model, transformed, 1);
  const double expected0 =
      std::expm1(std::log1p(raw.back()) + fc_model.point[0]);
  CHECK(fc.point[0] == doctest::Approx(expected0).epsilon(1e-9));
}

TEST_CASE("evaluate") {
  Forecast fc;
  fc.horizon = 2;
  fc.point = {3.0, 4.0};
  fc.se = {1.0, 2.0};
  fc.lower = {1.0, 1.0};
  fc.upper = {5.0, 7.0};

  SUBCASE("perfect forecast") {
    std::vector<double> actual = {3.0, 4.0};
    auto m = evaluate(fc, actual);
    CHECK(m.rmse == 0.0);
    CHECK(m.mse == 0.0);
    CHECK(m.ci_coverage == 1.0);
    CHECK(m.mean_se == doctest::Approx(1.5));
  }
  SUBCASE("zero forecast against 3,4") {
    Forecast zero = fc;
    zero.point = {0.0, 0.0};
    std::vector<double> actual = {3.0, 4.0};
    auto m = evaluate(zero, actual);
    CHECK(m.rmse == doctest::Approx(std::sqrt(12.5)).epsilon(1e-12));
    CHECK(m.mse == doctest::Approx(12.5).epsilon(1e-12));
  }
  SUBCASE("length mismatch is an error") {
    std::vector<double> actual = {1.0};
    CHECK_THROWS_AS(evaluate(fc, actual), ValidationError);
  }
}

TEST_CASE("train/test split") {
  std::vector<double> y(100);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = static_cast<double>(i);
  auto [train, test] = train_test_split(y, 0.7);
  CHECK(train.size() == 70);
  CHECK(test.size() == 30);

  std::vector<double> y10(10, 1.0);
  auto [t5, e5] = train_test_split(y10, 0.5);
  CHECK(t5.size() == 5);
  CHECK(e5.size() == 5);

  // Concatenation reconstructs the series exactly.
  std::vector<double> joined = train;
  joined.insert(joined.end(), test.begin(), test.end());
  CHECK(joined == y);

  CHECK_THROWS_AS(train_test_split(y, 0.0), ValidationError);
  CHECK_THROWS_AS(train_test_split(std::vector<double>{1.0}, 0.5), DataError);
}

TEST_CASE("grid search returns the singleton order when restricted") {
  const auto y = simulate({1, 0, 0, 0, 0, 0, 0}, {{0.5}, {}, {}, {}, 0.0},
                          1.0, 300, 8);
  GridSpec spec;
  spec.p_max = 1;
  spec.q_max = 0;
  spec.P_max = 0;
  spec.Q_max = 0;
  spec.d_max = 0;
  spec.D_max = 0;
  auto result = grid_search_serial(y, spec);
  REQUIRE(result.leaderboard.size() <= 2);  // (0,0,0) and (1,0,0)
  CHECK(result.best.order == SarimaOrder{1, 0, 0, 0, 0, 0, 0});
}

TEST_CASE("grid search leaderboard is sorted, stable, and matches the "
          "serial reference") {
  const auto y = simulate({1, 0, 1, 1, 0, 1, 12},
                          {{0.6}, {0.3}, {0.5}, {0.3}, 0.0}, 1.0, 300, 77);
  GridSpec spec;
  spec.p_max = 1;
  spec.q_max = 1;
  spec.P_max = 1;
  spec.Q_max = 1;
  spec.d_max = 0;
  spec.D_max = 0;
  spec.seasons = {12};

  auto serial = grid_search_serial(y, spec);
  for (std::size_t i = 1; i < serial.leaderboard.size(); ++i)
    CHECK(serial.leaderboard[i - 1].aic <= serial.leaderboard[i].aic);

  auto serial2 = grid_search_serial(y, spec);
  REQUIRE(serial2.leaderboard.size() == serial.leaderboard.size());
  for (std::size_t i = 0; i < serial.leaderboard.size(); ++i) {
    CHECK(serial2.leaderboard[i].order == serial.leaderboard[i].order);
    CHECK(serial2.leaderboard[i].aic == serial.leaderboard[i].aic);
  }

  for (int threads : {1, 2, 4}) {
    auto parallel = grid_search(y, spec, {}, threads);
    REQUIRE(parallel.leaderboard.size() == serial.leaderboard.size());
    for (std::size_t i = 0; i < serial.leaderboard.size(); ++i) {
      CHECK(parallel.leaderboard[i].order == serial.leaderboard[i].order);
      CHECK(parallel.leaderboard[i].aic == serial.leaderboard[i].aic);
    }
  }

  // Every leaderboard model is stationary and invertible by construction,
  // with non-decreasing forecast standard errors.
  for (const auto& entry : serial.leaderboard) {
    auto model = fit(y, entry.order);
    CHECK(model_stationary_invertible(model));
    auto fc = forecast(model, y, 24);
    for (std::size_t h = 1; h < fc.se.size(); ++h)
      CHECK(fc.se[h] >= fc.se[h - 1] - 1e-12);
  }

  // psi weights of the best model must decay for a stationary model.
  auto psi = psi_weights(serial.best, 300);
  CHECK(std::abs(psi.back()) < 1e-3);
}

TEST_CASE("grid search reports a per-order log when nothing converges") {
  std::vector<double> y(5, 1.0);  // far too short for any candidate
  GridSpec spec;
  spec.seasons = {12};
  try {
    grid_search_serial(y, spec);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    std::string msg = e.what();
    CHECK(msg.find("(0,0,0)") != std::string::npos);
    CHECK(msg.find("too short") != std::string::npos);
  }
}

TEST_CASE("grid-search best beats the mean-only forecast on seasonal data") {
  const auto y = simulate({1, 0, 0, 1, 0, 0, 12},
                          {{0.5}, {}, {0.7}, {}, 20.0}, 1.0, 360, 5);
  auto [train, test] = train_test_split(y, 0.7);

  GridSpec spec;
  spec.p_max = 1;
  spec.q_max = 1;
  spec.P_max = 1;
  spec.Q_max = 1;
  spec.d_max = 0;
  spec.D_max = 0;
  spec.seasons = {12};
  auto grid = grid_search(train, spec);
  auto fc = forecast(grid.best, train, static_cast<int>(test.size()));
  auto baseline_model = fit(train, {0, 0, 0, 0, 0, 0, 0});
  auto baseline = forecast(baseline_model, train,
                           static_cast<int>(test.size()));
  CHECK(evaluate(fc, test).rmse < evaluate(baseline, test).rmse);
}

TEST_CASE("model json round-trips") {
  const auto y = simulate({1, 0, 1, 0, 0, 0, 0}, {{0.5}, {-0.2}, {}, {}, 2.0},
                          1.0, 300, 13);
  auto model = fit(y, {1, 0, 1, 0, 0, 0, 0});
  diag::TransformRecord record;
  record.log_applied = true;
  record.diffs.push_back({1, {4.2}});

  auto text = io::model_json(model, record);
  auto [model2, record2] = io::parse_model_json(text);
  CHECK(model2.order == model.order);
  CHECK(model2.ar == model.ar);
  CHECK(model2.ma == model.ma);
  CHECK(model2.intercept == model.intercept);
  CHECK(model2.sigma2 == model.sigma2);
  CHECK(model2.aic == model.aic);
  CHECK(model2.converged == model.converged);
  CHECK(record2.log_applied);
  REQUIRE(record2.diffs.size() == 1);
  CHECK(record2.diffs[0].lag == 1);
  CHECK(record2.diffs[0].initial == std::vector<double>{4.2});
}
