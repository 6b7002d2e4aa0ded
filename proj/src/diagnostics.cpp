#include "pestpulse/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pestpulse/errors.hpp"
#include "pestpulse/stats.hpp"

namespace pestpulse::diag {

std::vector<double> acf(std::span<const double> values, int max_lag) {
  if (max_lag < 1) throw ValidationError("acf: max_lag must be >= 1");
  const std::size_t n = values.size();
  if (n <= static_cast<std::size_t>(max_lag))
    throw DataError("acf: series length must exceed max_lag");

  const double m = mean(values);
  double denom = 0.0;
  for (double v : values) denom += (v - m) * (v - m);
  if (denom <= 0.0)
    throw DataError("acf: series has zero variance");

  std::vector<double> r(static_cast<std::size_t>(max_lag) + 1, 0.0);
  r[0] = 1.0;
  for (int k = 1; k <= max_lag; ++k) {
    double num = 0.0;
    for (std::size_t t = 0; t + static_cast<std::size_t>(k) < n; ++t)
      num += (values[t] - m) * (values[t + static_cast<std::size_t>(k)] - m);
    r[static_cast<std::size_t>(k)] = num / denom;
  }
  return r;
}

std::vector<double> log_transform(std::span<const double> values) {
  std::vector<double> out;
  out.reserve(values.size());
  for (double v : values) {
    if (v < 0.0)
      throw DataError("log transform: negative value " + std::to_string(v));
    out.push_back(std::log1p(v));
  }
  return out;
}

std::vector<double> difference(std::span<const double> values, int lag) {
  if (lag < 1) throw ValidationError("difference: lag must be >= 1");
  const std::size_t n = values.size();
  if (static_cast<std::size_t>(lag) >= n)
    throw DataError("difference: lag " + std::to_string(lag) +
                    " is not below series length " + std::to_string(n));
  std::vector<double> out(n - static_cast<std::size_t>(lag));
  for (std::size_t t = 0; t < out.size(); ++t)
    out[t] = values[t + static_cast<std::size_t>(lag)] - values[t];
  return out;
}

RollingStats rolling_stats(std::span<const double> values, int window) {
  if (window < 1) throw ValidationError("rolling_stats: window must be >= 1");
  const std::size_t n = values.size();
  const std::size_t w = static_cast<std::size_t>(window);
  if (w > n) throw DataError("rolling_stats: window exceeds series length");

  RollingStats stats;
  stats.means.reserve(n - w + 1);
  stats.stds.reserve(n - w + 1);
  for (std::size_t i = 0; i + w <= n; ++i) {
    auto slice = values.subspan(i, w);
    double m = mean(slice);
    stats.means.push_back(m);
    stats.stds.push_back(std::sqrt(population_variance(slice)));
  }
  return stats;
}

namespace {

// Least squares via Householder QR. X is column-major m x p.
struct OlsFit {
  std::vector<double> coef;
  std::vector<double> xtx_inv_diag;
  double sse = 0.0;
  std::size_t m = 0;
  std::size_t p = 0;
};

OlsFit ols(std::vector<double> x, std::vector<double> y, std::size_t m,
           std::size_t p) {
  if (m <= p) throw DataError("ols: more parameters than observations");
  auto at = [&](std::size_t i, std::size_t j) -> double& {
    return x[j * m + i];
  };

  double max_norm = 0.0;
  for (std::size_t j = 0; j < p; ++j) {
    double norm = 0.0;
    for (std::size_t i = 0; i < m; ++i) norm += at(i, j) * at(i, j);
    max_norm = std::max(max_norm, std::sqrt(norm));
  }
  const double tol = 1e-10 * std::max(1.0, max_norm);

  std::vector<double> v(m);
  for (std::size_t k = 0; k < p; ++k) {
    double norm = 0.0;
    for (std::size_t i = k; i < m; ++i) norm += at(i, k) * at(i, k);
    norm = std::sqrt(norm);
    if (norm < tol)
      throw DataError("ols: regression matrix is singular");
    double alpha = at(k, k) > 0 ? -norm : norm;
    double vtv = norm * norm - 2.0 * alpha * at(k, k) + alpha * alpha;
    for (std::size_t i = k; i < m; ++i) v[i] = at(i, k);
    v[k] -= alpha;
    // Apply the reflector to the remaining columns and to y.
    for (std::size_t j = k; j < p; ++j) {
      double dot = 0.0;
      for (std::size_t i = k; i < m; ++i) dot += v[i] * at(i, j);
      double scale = 2.0 * dot / vtv;
      for (std::size_t i = k; i < m; ++i) at(i, j) -= scale * v[i];
    }
    double dot = 0.0;
    for (std::size_t i = k; i < m; ++i) dot += v[i] * y[i];
    double scale = 2.0 * dot / vtv;
    for (std::size_t i = k; i < m; ++i) y[i] -= scale * v[i];
  }

  for (std::size_t k = 0; k < p; ++k)
    if (std::abs(at(k, k)) < tol)
      throw DataError("ols: regression matrix is singular");

  OlsFit fit;
  fit.m = m;
  fit.p = p;
  fit.coef.assign(p, 0.0);
  for (std::size_t k = p; k-- > 0;) {
    double sum = y[k];
    for (std::size_t j = k + 1; j < p; ++j) sum -= at(k, j) * fit.coef[j];
    fit.coef[k] = sum / at(k, k);
  }
  for (std::size_t i = p; i < m; ++i) fit.sse += y[i] * y[i];

  // diag of (X'X)^{-1} = squared row norms of R^{-1}; row j solves
  // R^T z = e_j by forward substitution.
  fit.xtx_inv_diag.assign(p, 0.0);
  std::vector<double> z(p);
  for (std::size_t j = 0; j < p; ++j) {
    std::fill(z.begin(), z.end(), 0.0);
    for (std::size_t i = j; i < p; ++i) {
      double sum = (i == j) ? 1.0 : 0.0;
      for (std::size_t k2 = j; k2 < i; ++k2) sum -= at(k2, i) * z[k2];
      z[i] = sum / at(i, i);
    }
    double nrm = 0.0;
    for (std::size_t i = j; i < p; ++i) nrm += z[i] * z[i];
    fit.xtx_inv_diag[j] = nrm;
  }
  return fit;
}

// MacKinnon (2010) response-surface coefficients, constant-only case.
constexpr double kCrit[3][4] = {
    {-3.43035, -6.5393, -16.786, -79.433},  // 1%
    {-2.86154, -2.8903, -4.234, -40.040},   // 5%
    {-2.56677, -1.5384, -2.809, 0.0},       // 10%
};

// MacKinnon (1994) p-value surface, constant-only case.
constexpr double kTauMax = 2.74;
constexpr double kTauMin = -18.83;
constexpr double kTauStar = -1.61;
constexpr double kSmallP[3] = {2.1659, 1.4412, 0.038269};
constexpr double kLargeP[4] = {1.7339, 0.93202, -0.12745, -0.010368};

struct AdfRegression {
  double statistic;
  double sse;
  std::size_t n_obs;
};

// dy_t = a + g*y_{t-1} + sum_{i=1..k} b_i * dy_{t-i}, rows t = start..n-1.
AdfRegression adf_regression(std::span<const double> y, int k, int start) {
  const std::size_t n = y.size();
  const std::size_t m = n - static_cast<std::size_t>(start);
  const std::size_t p = 2 + static_cast<std::size_t>(k);

  std::vector<double> x(m * p);
  std::vector<double> dep(m);
  for (std::size_t r = 0; r < m; ++r) {
    const std::size_t t = static_cast<std::size_t>(start) + r;
    dep[r] = y[t] - y[t - 1];
    x[0 * m + r] = 1.0;
    x[1 * m + r] = y[t - 1];
    for (int i = 1; i <= k; ++i)
      x[(1 + static_cast<std::size_t>(i)) * m + r] =
          y[t - static_cast<std::size_t>(i)] -
          y[t - static_cast<std::size_t>(i) - 1];
  }

  OlsFit fit = ols(std::move(x), std::move(dep), m, p);
  double sigma2 = fit.sse / static_cast<double>(m - p);
  double se = std::sqrt(sigma2 * fit.xtx_inv_diag[1]);
  if (!(se > 0.0)) throw DataError("adf: degenerate regression");
  return {fit.coef[1] / se, fit.sse, m};
}

}  // namespace

std::array<double, 3> adf_critical_values(int n_obs) {
  std::array<double, 3> cv{};
  const double inv = 1.0 / static_cast<double>(n_obs);
  for (int level = 0; level < 3; ++level)
    cv[static_cast<std::size_t>(level)] =
        kCrit[level][0] + kCrit[level][1] * inv + kCrit[level][2] * inv * inv +
        kCrit[level][3] * inv * inv * inv;
  return cv;
}

double adf_pvalue(double statistic) {
  if (statistic > kTauMax) return 1.0;
  if (statistic < kTauMin) return 0.0;
  double z;
  if (statistic <= kTauStar) {
    z = kSmallP[0] + kSmallP[1] * statistic +
        kSmallP[2] * statistic * statistic;
  } else {
    z = kLargeP[0] +
        statistic * (kLargeP[1] + statistic * (kLargeP[2] + statistic * kLargeP[3]));
  }
  return normal_cdf(z);
}

int adf_default_max_lag(int n) {
  return static_cast<int>(
      std::floor(12.0 * std::pow(static_cast<double>(n) / 100.0, 0.25)));
}

AdfResult adf_test(std::span<const double> values, LagPolicy policy) {
  const int n = static_cast<int>(values.size());

  int lags = 0;
  if (policy.kind == LagPolicy::Kind::Fixed) {
    lags = policy.lags;
    if (lags < 0) throw ValidationError("adf: fixed lag must be >= 0");
    if (n < 20 + lags)
      throw DataError("adf: series too short (need >= " +
                      std::to_string(20 + lags) + " observations)");
  } else {
    int max_k = policy.lags >= 0 ? policy.lags : adf_default_max_lag(n);
    if (policy.lags >= 0 && n < 20 + max_k)
      throw DataError("adf: series too short (need >= " +
                      std::to_string(20 + max_k) + " observations)");
    // Keep the selection regression well-posed for the default rule.
    max_k = std::min(max_k, n - 20);
    max_k = std::min(max_k, n / 2 - 3);
    if (max_k < 0 || n < 20)
      throw DataError("adf: series too short (need >= 20 observations)");

    // Candidate lags compared over a common sample so AICs are comparable.
    const int start = max_k + 1;
    const std::size_t m = values.size() - static_cast<std::size_t>(start);
    double best_aic = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= max_k; ++k) {
      AdfRegression reg = adf_regression(values, k, start);
      double aic = static_cast<double>(m) *
                       std::log(reg.sse / static_cast<double>(m)) +
                   2.0 * (static_cast<double>(k) + 2.0);
      if (aic < best_aic) {
        best_aic = aic;
        lags = k;
      }
    }
  }

  AdfRegression reg = adf_regression(values, lags, lags + 1);
  AdfResult result;
  result.statistic = reg.statistic;
  result.lags_used = lags;
  result.n_obs = static_cast<int>(reg.n_obs);
  auto cv = adf_critical_values(result.n_obs);
  result.crit_1pct = cv[0];
  result.crit_5pct = cv[1];
  result.crit_10pct = cv[2];
  result.p_value = adf_pvalue(result.statistic);
  result.stationary_at_5pct = result.statistic < result.crit_5pct;
  return result;
}

std::vector<double> TransformRecord::push_difference(
    std::span<const double> values, int lag) {
  DiffPass pass;
  pass.lag = lag;
  pass.initial.assign(values.begin(),
                      values.begin() + static_cast<std::ptrdiff_t>(lag));
  std::vector<double> out = difference(values, lag);
  diffs.push_back(std::move(pass));
  return out;
}

namespace {

std::vector<double> invert_pass(const DiffPass& pass,
                                std::span<const double> diffed) {
  const std::size_t lag = static_cast<std::size_t>(pass.lag);
  std::vector<double> out(diffed.size() + lag);
  for (std::size_t i = 0; i < lag; ++i) out[i] = pass.initial[i];
  for (std::size_t t = lag; t < out.size(); ++t)
    out[t] = out[t - lag] + diffed[t - lag];
  return out;
}

}  // namespace

std::vector<double> TransformRecord::invert(
    std::span<const double> transformed) const {
  std::vector<double> cur(transformed.begin(), transformed.end());
  for (auto it = diffs.rbegin(); it != diffs.rend(); ++it)
    cur = invert_pass(*it, cur);
  if (log_applied)
    for (double& v : cur) v = std::expm1(v);
  return cur;
}

std::vector<double> TransformRecord::invert_continuation(
    std::span<const double> transformed_history,
    std::span<const double> continuation) const {
  // Rebuild the series at every differencing stage; stages[i] is the input
  // to diffs[i].
  const std::size_t passes = diffs.size();
  std::vector<std::vector<double>> stages(passes + 1);
  stages[passes].assign(transformed_history.begin(),
                        transformed_history.end());
  for (std::size_t i = passes; i-- > 0;)
    stages[i] = invert_pass(diffs[i], stages[i + 1]);

  std::vector<double> cont(continuation.begin(), continuation.end());
  for (std::size_t i = passes; i-- > 0;) {
    const std::size_t lag = static_cast<std::size_t>(diffs[i].lag);
    const std::vector<double>& hist = stages[i];
    std::vector<double> next(cont.size());
    for (std::size_t h = 0; h < cont.size(); ++h) {
      const std::size_t j = hist.size() + h - lag;
      const double base = j < hist.size() ? hist[j] : next[j - hist.size()];
      next[h] = cont[h] + base;
    }
    cont = std::move(next);
  }
  if (log_applied)
    for (double& v : cont) v = std::expm1(v);
  return cont;
}

StationarizeResult stationarize(std::span<const double> values,
                                LagPolicy policy, int max_diff_passes) {
  if (values.size() < 30)
    throw DataError("stationarize: need at least 30 observations");

  StationarizeResult result;
  result.values.assign(values.begin(), values.end());

  result.adf = adf_test(result.values, policy);
  if (result.adf.stationary_at_5pct) return result;

  // Counts admit the shifted log; skip it when negatives are present
  // (e.g. already-differenced input).
  bool non_negative =
      std::all_of(result.values.begin(), result.values.end(),
                  [](double v) { return v >= 0.0; });
  if (non_negative) {
    result.values = log_transform(result.values);
    result.record.log_applied = true;
    result.adf = adf_test(result.values, policy);
    result.adf.log_transform_applied = true;
    if (result.adf.stationary_at_5pct) return result;
  }

  for (int pass = 0; pass < max_diff_passes; ++pass) {
    result.values = result.record.push_difference(result.values, 1);
    result.adf = adf_test(result.values, policy);
    result.adf.log_transform_applied = result.record.log_applied;
    if (result.adf.stationary_at_5pct) return result;
  }

  throw NonStationaryError(
      "stationarize: still non-stationary after " +
          std::to_string(max_diff_passes) +
          " differencing passes (last ADF statistic " +
          std::to_string(result.adf.statistic) + ", 5% critical value " +
          std::to_string(result.adf.crit_5pct) + ")",
      result.adf);
}

std::vector<int> seasonal_period_candidates(std::span<const double> values,
                                            int max_lag) {
  const int n = static_cast<int>(values.size());
  if (max_lag <= 0) max_lag = std::min(n / 2, 36);
  if (max_lag < 3 || n <= max_lag) return {};

  std::vector<double> r;
  try {
    r = acf(values, max_lag);
  } catch (const DataError&) {
    return {};
  }

  const double band = 2.0 / std::sqrt(static_cast<double>(n));
  std::vector<int> candidates;
  for (int k = 2; k < max_lag && candidates.size() < 3; ++k) {
    const std::size_t i = static_cast<std::size_t>(k);
    if (!(r[i] > band && r[i] > r[i - 1] && r[i] >= r[i + 1])) continue;
    // Multiples of an accepted period are harmonics, not new candidates.
    bool harmonic = false;
    for (int c : candidates)
      if (k % c == 0) harmonic = true;
    if (!harmonic) candidates.push_back(k);
  }
  return candidates;
}

}  // namespace pestpulse::diag
