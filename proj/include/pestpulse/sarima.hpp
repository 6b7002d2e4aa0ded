#ifndef PESTPULSE_SARIMA_HPP
#define PESTPULSE_SARIMA_HPP

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pestpulse/diagnostics.hpp"

namespace pestpulse::sarima {

struct SarimaOrder {
  int p = 0, d = 0, q = 0;
  int P = 0, D = 0, Q = 0;
  int s = 0;  // ignored when P = D = Q = 0

  bool has_seasonal() const { return P > 0 || D > 0 || Q > 0; }
  int coefficient_count() const { return p + q + P + Q; }
  // Observations consumed before estimation is meaningful.
  int min_series_length() const {
    return 10 + p + q + (P + Q) * s + d + D * s;
  }
  void validate() const;
  std::string to_string() const;

  auto operator<=>(const SarimaOrder&) const = default;
};

struct SarimaCoeffs {
  std::vector<double> ar;
  std::vector<double> ma;
  std::vector<double> sar;
  std::vector<double> sma;
  double intercept = 0.0;  // process mean of the differenced series
};

struct SarimaModel {
  SarimaOrder order;
  std::vector<double> ar;
  std::vector<double> ma;
  std::vector<double> sar;
  std::vector<double> sma;
  double intercept = 0.0;
  double sigma2 = 0.0;
  double loglik = 0.0;
  double aic = 0.0;
  int n_fit = 0;
  bool converged = false;

  SarimaCoeffs coeffs() const { return {ar, ma, sar, sma, intercept}; }
};

struct OptimizerConfig {
  double tol = 1e-8;            // simplex-cycle improvement threshold
  int max_evals_per_dim = 800;  // hard stop; hitting it means not converged
};

// Gaussian conditional log-likelihood with sigma^2 profiled out, computed by
// the multiplicative SARMA residual recursion with zero pre-sample values.
// `diffed` must already be differenced d times at lag 1 and D times at lag s.
// Non-finite residuals yield -infinity.
double css_objective(const SarimaCoeffs& coeffs,
                     std::span<const double> diffed, const SarimaOrder& order);

// Partial-autocorrelation reparameterization: any real vector maps to a
// stationary AR (invertible MA) polynomial, and back.
std::vector<double> ar_from_unconstrained(std::span<const double> x);
std::vector<double> unconstrained_from_ar(std::span<const double> ar);
std::vector<double> ma_from_unconstrained(std::span<const double> x);
std::vector<double> unconstrained_from_ma(std::span<const double> ma);

bool ar_poly_stationary(std::span<const double> ar);
bool ma_poly_invertible(std::span<const double> ma);
bool model_stationary_invertible(const SarimaModel& model);

// Maximizes css_objective by Nelder-Mead restarted from three fixed points
// (all zero; small positive AR; small negative MA). Differencing per the
// order is applied internally. Deterministic.
SarimaModel fit(std::span<const double> series, const SarimaOrder& order,
                const OptimizerConfig& config = {});

struct GridSpec {
  int p_max = 2, q_max = 2;
  int P_max = 2, Q_max = 2;
  int d_min = 0, d_max = 1;
  int D_min = 0, D_max = 1;
  // Seasonal period candidates; empty means derive from ACF peaks.
  std::vector<int> seasons;
};

struct GridEntry {
  SarimaOrder order;
  double aic;
};

struct GridResult {
  SarimaModel best;
  std::vector<GridEntry> leaderboard;  // converged fits, AIC ascending
};

// Fits every order combination; non-converged fits are dropped from the
// leaderboard. Results are identical for any thread count.
GridResult grid_search(std::span<const double> series, const GridSpec& spec,
                       const OptimizerConfig& config = {}, int threads = 0);

// Serial reference used by tests and the benchmark.
GridResult grid_search_serial(std::span<const double> series,
                              const GridSpec& spec,
                              const OptimizerConfig& config = {});

struct Forecast {
  int horizon = 0;
  double level = 0.95;
  std::vector<double> point;
  std::vector<double> se;  // on the model (transformed) scale
  std::vector<double> lower;
  std::vector<double> upper;
};

// Point forecasts by iterating the SARMA recursion with future shocks zero;
// standard errors from the psi-weights of the differencing-integrated
// transfer polynomial. When `outer` is given (the stationarize trail for
// `history`), point and interval endpoints are mapped back through it.
Forecast forecast(const SarimaModel& model, std::span<const double> history,
                  int horizon, double level = 0.95,
                  const diag::TransformRecord* outer = nullptr);

// psi[0..count-1] of the full transfer polynomial (differencing included).
std::vector<double> psi_weights(const SarimaModel& model, int count);

struct EvalMetrics {
  double rmse = 0.0;
  double mse = 0.0;
  double mean_se = 0.0;
  double ci_coverage = 0.0;
};

EvalMetrics evaluate(const Forecast& forecast, std::span<const double> actual);

// Seeded SARMA simulator with burn-in and trend/seasonal integration.
// Deterministic per seed; the test oracle for fit and grid_search.
std::vector<double> simulate(const SarimaOrder& order,
                             const SarimaCoeffs& coeffs, double sigma, int n,
                             std::uint64_t seed);

// Chronological split at floor(n * train_fraction); no shuffling.
std::pair<std::vector<double>, std::vector<double>> train_test_split(
    std::span<const double> series, double train_fraction);

}  // namespace pestpulse::sarima

#endif  // PESTPULSE_SARIMA_HPP
