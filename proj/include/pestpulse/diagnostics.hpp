#ifndef PESTPULSE_DIAGNOSTICS_HPP
#define PESTPULSE_DIAGNOSTICS_HPP

#include <array>
#include <span>
#include <string>
#include <vector>

#include "pestpulse/errors.hpp"

namespace pestpulse::diag {

// Autocorrelation r[0..max_lag], r[0] = 1. Throws on zero-variance input.
std::vector<double> acf(std::span<const double> values, int max_lag);

// Elementwise ln(1 + v); count series contain zeros, so the shifted log.
std::vector<double> log_transform(std::span<const double> values);

// out[t] = y[t + lag] - y[t]; output shorter by `lag`.
std::vector<double> difference(std::span<const double> values, int lag);

struct RollingStats {
  std::vector<double> means;
  std::vector<double> stds;  // population standard deviation
};

RollingStats rolling_stats(std::span<const double> values, int window);

struct AdfResult {
  double statistic = 0.0;
  double p_value = 1.0;
  int lags_used = 0;
  int n_obs = 0;
  double crit_1pct = 0.0;
  double crit_5pct = 0.0;
  double crit_10pct = 0.0;
  bool log_transform_applied = false;
  bool stationary_at_5pct = false;
};

struct LagPolicy {
  enum class Kind { Fixed, AicAuto };
  Kind kind = Kind::AicAuto;
  int lags = -1;  // fixed k, or max k for auto (-1 = default rule)

  static LagPolicy fixed(int k) { return {Kind::Fixed, k}; }
  static LagPolicy aic_auto(int max_k = -1) { return {Kind::AicAuto, max_k}; }
};

// Augmented Dickey-Fuller regression with constant, no trend:
//   dy_t = alpha + gamma*y_{t-1} + sum_i beta_i*dy_{t-i} + e_t
// Statistic is the t-ratio of gamma. Critical values from the MacKinnon
// (2010) finite-sample response surface, p-value from the MacKinnon (1994)
// surface, both for the constant-only case.
AdfResult adf_test(std::span<const double> values,
                   LagPolicy policy = LagPolicy::aic_auto());

// Finite-sample {1%, 5%, 10%} critical values at a given regression size.
std::array<double, 3> adf_critical_values(int n_obs);

double adf_pvalue(double statistic);

// Default auto-lag bound: floor(12 * (n/100)^0.25).
int adf_default_max_lag(int n);

struct DiffPass {
  int lag = 1;
  std::vector<double> initial;  // first `lag` values consumed by the pass
};

// Log/difference trail with enough state to undo itself exactly, both for
// whole series and for forecast continuations.
struct TransformRecord {
  bool log_applied = false;
  std::vector<DiffPass> diffs;

  bool empty() const { return !log_applied && diffs.empty(); }

  // Applies one more differencing pass, recording the consumed values.
  std::vector<double> push_difference(std::span<const double> values, int lag);

  // Exact inverse of the recorded transforms.
  std::vector<double> invert(std::span<const double> transformed) const;

  // Continues the inversion past the end of the transformed history:
  // given the transformed series and further values on the same scale,
  // returns those further values on the original scale.
  std::vector<double> invert_continuation(
      std::span<const double> transformed_history,
      std::span<const double> continuation) const;
};

struct StationarizeResult {
  std::vector<double> values;
  TransformRecord record;
  AdfResult adf;
};

// Raised when the differencing budget runs out; carries the failing test.
class NonStationaryError : public DataError {
 public:
  NonStationaryError(const std::string& msg, AdfResult last)
      : DataError(msg), last_adf(last) {}

  AdfResult last_adf;
};

// ADF on the raw series; if non-stationary, log-transform (when the values
// permit) and retest, then first-difference up to `max_diff_passes` times,
// retesting after each pass. Throws DataError carrying the last statistic
// when still non-stationary.
StationarizeResult stationarize(std::span<const double> values,
                                LagPolicy policy = LagPolicy::aic_auto(),
                                int max_diff_passes = 2);

// Lags with a local-max autocorrelation above the 2/sqrt(n) band, smallest
// first, at most three; multiples of an accepted lag are treated as
// harmonics and skipped. Used as default seasonal-period candidates.
std::vector<int> seasonal_period_candidates(std::span<const double> values,
                                            int max_lag = 0);

}  // namespace pestpulse::diag

#endif  // PESTPULSE_DIAGNOSTICS_HPP
