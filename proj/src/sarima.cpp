#include "pestpulse/sarima.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "pestpulse/errors.hpp"
#include "pestpulse/rng.hpp"
#include "pestpulse/stats.hpp"

namespace pestpulse::sarima {

void SarimaOrder::validate() const {
  if (p < 0 || d < 0 || q < 0 || P < 0 || D < 0 || Q < 0)
    throw ValidationError("sarima: negative order");
  if (d + D > 3)
    throw ValidationError("sarima: d + D must be <= 3");
  if (has_seasonal() && s < 2)
    throw ValidationError(
        "sarima: seasonal period must be >= 2 when seasonal orders are set");
  if (p > 16 || q > 16 || P > 16 || Q > 16)
    throw ValidationError("sarima: order out of supported range");
}

std::string SarimaOrder::to_string() const {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "(%d,%d,%d)(%d,%d,%d)[%d]", p, d, q, P, D, Q,
                has_seasonal() ? s : 0);
  return buf;
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct LagTerm {
  int lag;
  double coeff;
};

// Multiplicative expansion of base(B) * seasonal(B^s). For the AR side the
// terms are subtracted from z_t (cross sign -1); for the MA side they are
// added to eps_t (cross sign +1).
std::vector<LagTerm> expand_seasonal(std::span<const double> base,
                                     std::span<const double> seasonal, int s,
                                     double cross_sign) {
  std::vector<LagTerm> terms;
  terms.reserve(base.size() + seasonal.size() +
                base.size() * seasonal.size());
  for (std::size_t i = 0; i < base.size(); ++i)
    terms.push_back({static_cast<int>(i) + 1, base[i]});
  for (std::size_t j = 0; j < seasonal.size(); ++j) {
    const int js = (static_cast<int>(j) + 1) * s;
    terms.push_back({js, seasonal[j]});
    for (std::size_t i = 0; i < base.size(); ++i)
      terms.push_back(
          {static_cast<int>(i) + 1 + js, cross_sign * base[i] * seasonal[j]});
  }
  return terms;
}

struct LagOps {
  std::vector<LagTerm> ar;  // z_t - sum c*z_{t-lag} drives the residual
  std::vector<LagTerm> ma;  // plus sum m*eps_{t-lag}
  int max_ar_lag = 0;
};

LagOps make_ops(const SarimaCoeffs& coeffs, const SarimaOrder& order) {
  LagOps ops;
  ops.ar = expand_seasonal(coeffs.ar, coeffs.sar, order.s, -1.0);
  ops.ma = expand_seasonal(coeffs.ma, coeffs.sma, order.s, +1.0);
  for (const auto& t : ops.ar) ops.max_ar_lag = std::max(ops.max_ar_lag, t.lag);
  return ops;
}

// Residual recursion; returns the sum of squared residuals or NaN.
double css_sse(std::span<const double> z, double mu, const LagOps& ops,
               std::vector<double>& eps) {
  const std::size_t n = z.size();
  eps.resize(n);
  double sse = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    double e = z[t] - mu;
    for (const auto& term : ops.ar) {
      const std::size_t lag = static_cast<std::size_t>(term.lag);
      if (lag <= t) e -= term.coeff * (z[t - lag] - mu);
    }
    for (const auto& term : ops.ma) {
      const std::size_t lag = static_cast<std::size_t>(term.lag);
      if (lag <= t) e -= term.coeff * eps[t - lag];
    }
    eps[t] = e;
    sse += e * e;
  }
  return sse;
}

double loglik_from_sse(double sse, std::size_t n) {
  if (!std::isfinite(sse)) return kNegInf;
  double sigma2 = sse / static_cast<double>(n);
  if (sigma2 < 1e-300) sigma2 = 1e-300;
  return -0.5 * static_cast<double>(n) *
         (std::log(2.0 * std::numbers::pi * sigma2) + 1.0);
}

// ---- partial autocorrelation (Monahan) reparameterization ----

constexpr std::size_t kMaxPoly = 18;

// In place: pacf values -> AR coefficients (Levinson recursion).
void pacf_to_coeffs(std::span<double> a) {
  double tmp[kMaxPoly];
  for (std::size_t k = 1; k < a.size(); ++k) {
    for (std::size_t i = 0; i < k; ++i) tmp[i] = a[i];
    for (std::size_t i = 0; i < k; ++i) a[i] = tmp[i] - a[k] * tmp[k - 1 - i];
  }
}

// In place inverse; returns false when the polynomial is not stationary.
bool coeffs_to_pacf(std::span<double> a) {
  double tmp[kMaxPoly];
  for (std::size_t k = a.size(); k-- > 1;) {
    const double r = a[k];
    if (!(std::abs(r) < 1.0)) return false;
    const double denom = 1.0 - r * r;
    for (std::size_t i = 0; i < k; ++i)
      tmp[i] = (a[i] + r * a[k - 1 - i]) / denom;
    for (std::size_t i = 0; i < k; ++i) a[i] = tmp[i];
  }
  if (!a.empty() && !(std::abs(a[0]) < 1.0)) return false;
  return true;
}

void decode_ar_inplace(std::span<double> x) {
  for (double& v : x) v = std::tanh(v);
  pacf_to_coeffs(x);
}

void decode_ma_inplace(std::span<double> x) {
  for (double& v : x) v = std::tanh(v);
  pacf_to_coeffs(x);
  for (double& v : x) v = -v;
}

// ---- dense polynomials for psi weights ----

std::vector<double> poly_mult(std::span<const double> a,
                              std::span<const double> b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

// 1 + sign*c_1*B^s + sign*c_2*B^{2s} + ... (sign -1 for AR, +1 for MA).
std::vector<double> lag_poly(std::span<const double> coeffs, int s,
                             double sign) {
  std::vector<double> out(coeffs.size() * static_cast<std::size_t>(s) + 1,
                          0.0);
  out[0] = 1.0;
  for (std::size_t j = 0; j < coeffs.size(); ++j)
    out[(j + 1) * static_cast<std::size_t>(s)] = sign * coeffs[j];
  return out;
}

std::vector<double> differencing_poly(int d, int D, int s) {
  std::vector<double> out{1.0};
  const std::vector<double> one{1.0};
  for (int i = 0; i < d; ++i) out = poly_mult(out, lag_poly(one, 1, -1.0));
  if (D > 0 && s >= 1)
    for (int j = 0; j < D; ++j) out = poly_mult(out, lag_poly(one, s, -1.0));
  return out;
}

}  // namespace

double css_objective(const SarimaCoeffs& coeffs,
                     std::span<const double> diffed,
                     const SarimaOrder& order) {
  if (diffed.empty()) throw DataError("sarima: empty series");
  LagOps ops = make_ops(coeffs, order);
  std::vector<double> eps;
  return loglik_from_sse(css_sse(diffed, coeffs.intercept, ops, eps),
                         diffed.size());
}

std::vector<double> ar_from_unconstrained(std::span<const double> x) {
  if (x.size() > kMaxPoly) throw ValidationError("sarima: order too large");
  std::vector<double> a(x.begin(), x.end());
  decode_ar_inplace(a);
  return a;
}

std::vector<double> unconstrained_from_ar(std::span<const double> ar) {
  if (ar.size() > kMaxPoly) throw ValidationError("sarima: order too large");
  std::vector<double> a(ar.begin(), ar.end());
  if (!coeffs_to_pacf(a))
    throw ValidationError("sarima: AR polynomial is not stationary");
  for (double& v : a) v = std::atanh(v);
  return a;
}

std::vector<double> ma_from_unconstrained(std::span<const double> x) {
  if (x.size() > kMaxPoly) throw ValidationError("sarima: order too large");
  std::vector<double> a(x.begin(), x.end());
  decode_ma_inplace(a);
  return a;
}

std::vector<double> unconstrained_from_ma(std::span<const double> ma) {
  if (ma.size() > kMaxPoly) throw ValidationError("sarima: order too large");
  std::vector<double> a(ma.size());
  for (std::size_t i = 0; i < ma.size(); ++i) a[i] = -ma[i];
  if (!coeffs_to_pacf(a))
    throw ValidationError("sarima: MA polynomial is not invertible");
  for (double& v : a) v = std::atanh(v);
  return a;
}

bool ar_poly_stationary(std::span<const double> ar) {
  if (ar.size() > kMaxPoly) return false;
  std::vector<double> a(ar.begin(), ar.end());
  return coeffs_to_pacf(a);
}

bool ma_poly_invertible(std::span<const double> ma) {
  std::vector<double> a(ma.size());
  for (std::size_t i = 0; i < ma.size(); ++i) a[i] = -ma[i];
  return ar_poly_stationary(a);
}

bool model_stationary_invertible(const SarimaModel& model) {
  return ar_poly_stationary(model.ar) && ar_poly_stationary(model.sar) &&
         ma_poly_invertible(model.ma) && ma_poly_invertible(model.sma);
}

namespace {

// ---- Nelder-Mead ----

struct NmResult {
  std::vector<double> x;
  double f = kNegInf;
  bool converged = false;
};

NmResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                     std::span<const double> x0,
                     std::span<const double> steps, double tol,
                     int max_evals) {
  const std::size_t dim = x0.size();
  const std::size_t np = dim + 1;
  std::vector<std::vector<double>> simplex(np,
                                           std::vector<double>(x0.begin(),
                                                               x0.end()));
  std::vector<double> fx(np);
  int evals = 0;
  auto eval = [&](std::span<const double> x) {
    ++evals;
    double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::max();
  };

  for (std::size_t i = 1; i < np; ++i) simplex[i][i - 1] += steps[i - 1];
  for (std::size_t i = 0; i < np; ++i) fx[i] = eval(simplex[i]);

  std::vector<std::size_t> idx(np);
  std::vector<double> centroid(dim), trial(dim), trial2(dim);
  bool converged = false;
  double prev_best = std::numeric_limits<double>::max();
  int flat_cycles = 0;

  while (evals < max_evals) {
    for (std::size_t i = 0; i < np; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return fx[a] < fx[b]; });
    const std::size_t best = idx[0], worst = idx[np - 1],
                      second_worst = idx[np - 2];

    // Converged once a full cycle stops improving the best vertex and the
    // simplex has collapsed in objective value.
    if (fx[worst] - fx[best] < tol) {
      converged = true;
      break;
    }
    if (prev_best - fx[best] < tol) {
      if (++flat_cycles >= 8) {
        converged = true;
        break;
      }
    } else {
      flat_cycles = 0;
    }
    prev_best = fx[best];

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i < np; ++i) {
      if (i == worst) continue;
      for (std::size_t k = 0; k < dim; ++k) centroid[k] += simplex[i][k];
    }
    for (std::size_t k = 0; k < dim; ++k)
      centroid[k] /= static_cast<double>(dim);

    for (std::size_t k = 0; k < dim; ++k)
      trial[k] = centroid[k] + (centroid[k] - simplex[worst][k]);
    double f_reflect = eval(trial);

    if (f_reflect < fx[best]) {
      for (std::size_t k = 0; k < dim; ++k)
        trial2[k] = centroid[k] + 2.0 * (centroid[k] - simplex[worst][k]);
      double f_expand = eval(trial2);
      if (f_expand < f_reflect) {
        simplex[worst] = trial2;
        fx[worst] = f_expand;
      } else {
        simplex[worst] = trial;
        fx[worst] = f_reflect;
      }
    } else if (f_reflect < fx[second_worst]) {
      simplex[worst] = trial;
      fx[worst] = f_reflect;
    } else {
      const bool outside = f_reflect < fx[worst];
      for (std::size_t k = 0; k < dim; ++k) {
        double toward = outside ? trial[k] : simplex[worst][k];
        trial2[k] = centroid[k] + 0.5 * (toward - centroid[k]);
      }
      double f_contract = eval(trial2);
      if (f_contract < std::min(f_reflect, fx[worst])) {
        simplex[worst] = trial2;
        fx[worst] = f_contract;
      } else {
        // Shrink toward the best vertex.
        for (std::size_t i = 0; i < np; ++i) {
          if (i == best) continue;
          for (std::size_t k = 0; k < dim; ++k)
            simplex[i][k] =
                simplex[best][k] + 0.5 * (simplex[i][k] - simplex[best][k]);
          fx[i] = eval(simplex[i]);
        }
      }
    }
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < np; ++i)
    if (fx[i] < fx[best]) best = i;
  NmResult result;
  result.x = simplex[best];
  result.f = -fx[best];  // back to a log-likelihood
  result.converged = converged;
  return result;
}

std::vector<double> apply_internal_differencing(
    std::span<const double> series, const SarimaOrder& order,
    diag::TransformRecord* record) {
  std::vector<double> z(series.begin(), series.end());
  diag::TransformRecord scratch;
  diag::TransformRecord& rec = record ? *record : scratch;
  for (int i = 0; i < order.d; ++i) z = rec.push_difference(z, 1);
  for (int j = 0; j < order.D; ++j) z = rec.push_difference(z, order.s);
  return z;
}

struct ParamLayout {
  int p, q, P, Q;
  std::size_t dim() const {
    return 1 + static_cast<std::size_t>(p + q + P + Q);
  }
};

SarimaCoeffs decode_params(std::span<const double> x, const ParamLayout& lay) {
  SarimaCoeffs c;
  c.intercept = x[0];
  std::size_t pos = 1;
  auto take = [&](int count) {
    std::vector<double> block(x.begin() + static_cast<std::ptrdiff_t>(pos),
                              x.begin() +
                                  static_cast<std::ptrdiff_t>(pos + count));
    pos += static_cast<std::size_t>(count);
    return block;
  };
  c.ar = take(lay.p);
  decode_ar_inplace(c.ar);
  c.ma = take(lay.q);
  decode_ma_inplace(c.ma);
  c.sar = take(lay.P);
  decode_ar_inplace(c.sar);
  c.sma = take(lay.Q);
  decode_ma_inplace(c.sma);
  return c;
}

std::vector<double> encode_params(const SarimaCoeffs& c, double mu) {
  std::vector<double> x;
  x.push_back(mu);
  auto append = [&](const std::vector<double>& block) {
    for (double v : block) x.push_back(v);
  };
  append(unconstrained_from_ar(c.ar));
  append(unconstrained_from_ma(c.ma));
  append(unconstrained_from_ar(c.sar));
  append(unconstrained_from_ma(c.sma));
  return x;
}

}  // namespace

SarimaModel fit(std::span<const double> series, const SarimaOrder& order,
                const OptimizerConfig& config) {
  order.validate();
  if (static_cast<int>(series.size()) < order.min_series_length())
    throw DataError("sarima: series of length " +
                    std::to_string(series.size()) + " is too short for " +
                    order.to_string() + " (need >= " +
                    std::to_string(order.min_series_length()) + ")");

  const std::vector<double> z = apply_internal_differencing(series, order,
                                                            nullptr);
  const std::size_t n = z.size();

  SarimaModel model;
  model.order = order;
  model.n_fit = static_cast<int>(n);

  const ParamLayout layout{order.p, order.q, order.P, order.Q};
  LagOps ops;
  std::vector<double> eps;

  if (order.coefficient_count() == 0) {
    // Intercept-only: the CSS minimizer is the sample mean, exactly.
    model.intercept = mean(z);
    model.converged = true;
  } else {
    const double mu0 = mean(z);
    double sd = std::sqrt(population_variance(z));
    if (!(sd > 0.0)) sd = 1.0;

    auto objective = [&](std::span<const double> x) -> double {
      SarimaCoeffs c = decode_params(x, layout);
      ops.ar = expand_seasonal(c.ar, c.sar, order.s, -1.0);
      ops.ma = expand_seasonal(c.ma, c.sma, order.s, +1.0);
      double ll = loglik_from_sse(css_sse(z, c.intercept, ops, eps), n);
      return -ll;
    };

    // Three fixed restart points, expressed in coefficient space.
    auto coeff_start = [&](double ar_val, double ma_val) {
      SarimaCoeffs c;
      c.ar.assign(static_cast<std::size_t>(order.p), ar_val);
      c.ma.assign(static_cast<std::size_t>(order.q), ma_val);
      c.sar.assign(static_cast<std::size_t>(order.P), ar_val);
      c.sma.assign(static_cast<std::size_t>(order.Q), ma_val);
      return encode_params(c, mu0);
    };
    const std::vector<std::vector<double>> starts = {
        coeff_start(0.0, 0.0), coeff_start(0.1, 0.0), coeff_start(0.0, -0.1)};

    std::vector<double> steps(layout.dim(), 0.25);
    steps[0] = std::max(0.1 * sd, 1e-3);
    const int max_evals =
        config.max_evals_per_dim * static_cast<int>(layout.dim());

    NmResult best;
    bool have_best = false;
    for (const auto& start : starts) {
      NmResult r = nelder_mead(objective, start, steps, config.tol, max_evals);
      if (!have_best || r.f > best.f ||
          (r.f == best.f && r.converged && !best.converged)) {
        best = r;
        have_best = true;
      }
    }

    SarimaCoeffs c = decode_params(best.x, layout);
    model.ar = c.ar;
    model.ma = c.ma;
    model.sar = c.sar;
    model.sma = c.sma;
    model.intercept = c.intercept;
    model.converged = best.converged;
  }

  ops = make_ops(model.coeffs(), order);
  double sse = css_sse(z, model.intercept, ops, eps);
  model.sigma2 = std::max(sse / static_cast<double>(n), 1e-300);
  model.loglik = loglik_from_sse(sse, n);
  const int k = order.coefficient_count() + 2;  // intercept and sigma2
  model.aic = -2.0 * model.loglik + 2.0 * static_cast<double>(k);
  return model;
}

namespace {

std::vector<SarimaOrder> enumerate_grid(std::span<const double> series,
                                        const GridSpec& spec) {
  std::vector<int> seasons = spec.seasons;
  if (seasons.empty()) seasons = diag::seasonal_period_candidates(series);

  std::vector<SarimaOrder> orders;
  for (int d = spec.d_min; d <= spec.d_max; ++d)
    for (int p = 0; p <= spec.p_max; ++p)
      for (int q = 0; q <= spec.q_max; ++q) {
        orders.push_back({p, d, q, 0, 0, 0, 0});
        for (int s : seasons)
          for (int D = spec.D_min; D <= spec.D_max; ++D)
            for (int P = 0; P <= spec.P_max; ++P)
              for (int Q = 0; Q <= spec.Q_max; ++Q) {
                if (P == 0 && D == 0 && Q == 0) continue;
                orders.push_back({p, d, q, P, D, Q, s});
              }
      }
  return orders;
}

GridResult collect_grid(std::span<const double> series,
                        const std::vector<SarimaOrder>& orders,
                        std::vector<SarimaModel>& fits,
                        std::vector<int>& status,
                        const std::vector<std::string>& failures) {
  std::vector<std::size_t> converged;
  for (std::size_t i = 0; i < orders.size(); ++i)
    if (status[i] == 0 && fits[i].converged) converged.push_back(i);

  if (converged.empty()) {
    std::string log = "sarima grid: no order converged on a series of length " +
                      std::to_string(series.size());
    for (std::size_t i = 0; i < orders.size(); ++i) {
      log += "\n  " + orders[i].to_string() + ": ";
      log += status[i] != 0 ? failures[i] : "did not converge";
    }
    throw DataError(log);
  }

  std::sort(converged.begin(), converged.end(),
            [&](std::size_t a, std::size_t b) {
              if (fits[a].aic != fits[b].aic) return fits[a].aic < fits[b].aic;
              return orders[a] < orders[b];
            });

  GridResult result;
  result.best = fits[converged.front()];
  result.leaderboard.reserve(converged.size());
  for (std::size_t i : converged)
    result.leaderboard.push_back({orders[i], fits[i].aic});
  return result;
}

}  // namespace

GridResult grid_search_serial(std::span<const double> series,
                              const GridSpec& spec,
                              const OptimizerConfig& config) {
  const std::vector<SarimaOrder> orders = enumerate_grid(series, spec);
  std::vector<SarimaModel> fits(orders.size());
  std::vector<int> status(orders.size(), 0);
  std::vector<std::string> failures(orders.size());
  for (std::size_t i = 0; i < orders.size(); ++i) {
    try {
      fits[i] = fit(series, orders[i], config);
    } catch (const std::exception& e) {
      status[i] = 1;
      failures[i] = e.what();
    }
  }
  return collect_grid(series, orders, fits, status, failures);
}

GridResult grid_search(std::span<const double> series, const GridSpec& spec,
                       const OptimizerConfig& config, int threads) {
#ifdef _OPENMP
  const std::vector<SarimaOrder> orders = enumerate_grid(series, spec);
  std::vector<SarimaModel> fits(orders.size());
  std::vector<int> status(orders.size(), 0);
  std::vector<std::string> failures(orders.size());
  int num_threads = threads > 0 ? threads : omp_get_max_threads();
  // Fits are independent; the merge below is index-ordered so the result
  // does not depend on the thread count.
#pragma omp parallel for schedule(dynamic) num_threads(num_threads)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(orders.size()); ++i) {
    const auto idx = static_cast<std::size_t>(i);
    try {
      fits[idx] = fit(series, orders[idx], config);
    } catch (const std::exception& e) {
      status[idx] = 1;
      failures[idx] = e.what();
    }
  }
  return collect_grid(series, orders, fits, status, failures);
#else
  (void)threads;
  return grid_search_serial(series, spec, config);
#endif
}

std::vector<double> psi_weights(const SarimaModel& model, int count) {
  const auto& o = model.order;
  std::vector<double> a = lag_poly(model.ar, 1, -1.0);
  if (!model.sar.empty()) a = poly_mult(a, lag_poly(model.sar, o.s, -1.0));
  a = poly_mult(a, differencing_poly(o.d, o.D, o.s));
  std::vector<double> m = lag_poly(model.ma, 1, +1.0);
  if (!model.sma.empty()) m = poly_mult(m, lag_poly(model.sma, o.s, +1.0));

  if (count <= 0) return {};
  std::vector<double> psi(static_cast<std::size_t>(count), 0.0);
  psi[0] = 1.0;
  for (std::size_t j = 1; j < psi.size(); ++j) {
    double value = j < m.size() ? m[j] : 0.0;
    const std::size_t kmax = std::min(j, a.size() - 1);
    for (std::size_t k = 1; k <= kmax; ++k) value -= a[k] * psi[j - k];
    psi[j] = value;
  }
  return psi;
}

Forecast forecast(const SarimaModel& model, std::span<const double> history,
                  int horizon, double level,
                  const diag::TransformRecord* outer) {
  if (horizon < 1) throw ValidationError("forecast: horizon must be >= 1");
  if (!(level > 0.0 && level < 1.0))
    throw ValidationError("forecast: level must lie in (0, 1)");
  if (history.empty()) throw DataError("forecast: empty history");

  const SarimaOrder& order = model.order;
  diag::TransformRecord internal;
  std::vector<double> z =
      apply_internal_differencing(history, order, &internal);
  if (z.empty()) throw DataError("forecast: history shorter than differencing");

  LagOps ops = make_ops(model.coeffs(), order);
  std::vector<double> eps;
  css_sse(z, model.intercept, ops, eps);

  const std::size_t n = z.size();
  const std::size_t h = static_cast<std::size_t>(horizon);
  std::vector<double> zext = z;
  std::vector<double> epsext = eps;
  zext.reserve(n + h);
  epsext.reserve(n + h);
  for (std::size_t step = 0; step < h; ++step) {
    const std::size_t t = n + step;
    double value = model.intercept;
    for (const auto& term : ops.ar) {
      const std::size_t lag = static_cast<std::size_t>(term.lag);
      if (lag <= t)
        value += term.coeff * (zext[t - lag] - model.intercept);
    }
    for (const auto& term : ops.ma) {
      const std::size_t lag = static_cast<std::size_t>(term.lag);
      if (lag <= t) value += term.coeff * epsext[t - lag];
    }
    zext.push_back(value);
    epsext.push_back(0.0);
  }

  Forecast fc;
  fc.horizon = horizon;
  fc.level = level;
  fc.point.assign(zext.begin() + static_cast<std::ptrdiff_t>(n), zext.end());
  if (!internal.empty())
    fc.point = internal.invert_continuation(z, fc.point);

  const std::vector<double> psi = psi_weights(model, horizon);
  const double sigma = std::sqrt(model.sigma2);
  fc.se.resize(h);
  double cum = 0.0;
  for (std::size_t step = 0; step < h; ++step) {
    cum += psi[step] * psi[step];
    fc.se[step] = sigma * std::sqrt(cum);
  }

  const double zq = normal_quantile(0.5 * (1.0 + level));
  fc.lower.resize(h);
  fc.upper.resize(h);
  for (std::size_t step = 0; step < h; ++step) {
    fc.lower[step] = fc.point[step] - zq * fc.se[step];
    fc.upper[step] = fc.point[step] + zq * fc.se[step];
  }

  if (outer && !outer->empty()) {
    fc.point = outer->invert_continuation(history, fc.point);
    fc.lower = outer->invert_continuation(history, fc.lower);
    fc.upper = outer->invert_continuation(history, fc.upper);
  }
  return fc;
}

EvalMetrics evaluate(const Forecast& forecast,
                     std::span<const double> actual) {
  if (actual.size() != forecast.point.size())
    throw ValidationError("evaluate: forecast and actual lengths differ (" +
                          std::to_string(forecast.point.size()) + " vs " +
                          std::to_string(actual.size()) + ")");
  if (actual.empty()) throw ValidationError("evaluate: empty inputs");

  EvalMetrics m;
  double sq = 0.0, se_sum = 0.0;
  std::size_t inside = 0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    const double err = forecast.point[i] - actual[i];
    sq += err * err;
    se_sum += forecast.se[i];
    if (actual[i] >= forecast.lower[i] && actual[i] <= forecast.upper[i])
      ++inside;
  }
  const double n = static_cast<double>(actual.size());
  m.mse = sq / n;
  m.rmse = std::sqrt(m.mse);
  m.mean_se = se_sum / n;
  m.ci_coverage = static_cast<double>(inside) / n;
  return m;
}

std::vector<double> simulate(const SarimaOrder& order,
                             const SarimaCoeffs& coeffs, double sigma, int n,
                             std::uint64_t seed) {
  order.validate();
  if (n < 1) throw ValidationError("simulate: n must be >= 1");
  if (!(sigma >= 0.0)) throw ValidationError("simulate: sigma must be >= 0");
  if (static_cast<int>(coeffs.ar.size()) != order.p ||
      static_cast<int>(coeffs.ma.size()) != order.q ||
      static_cast<int>(coeffs.sar.size()) != order.P ||
      static_cast<int>(coeffs.sma.size()) != order.Q)
    throw ValidationError("simulate: coefficient counts do not match order");
  if (!ar_poly_stationary(coeffs.ar) || !ar_poly_stationary(coeffs.sar) ||
      !ma_poly_invertible(coeffs.ma) || !ma_poly_invertible(coeffs.sma))
    throw DataError("simulate: explosive or non-invertible coefficients");

  const int effective_s = order.has_seasonal() ? order.s : 0;
  const int burn = 10 * (effective_s + order.p + order.q);
  const std::size_t total = static_cast<std::size_t>(burn + n);

  LagOps ops = make_ops(coeffs, order);
  SeededRng rng(seed);
  std::vector<double> z(total), eps(total);
  for (std::size_t t = 0; t < total; ++t) {
    double e = sigma * rng.gaussian();
    eps[t] = e;
    double value = coeffs.intercept + e;
    for (const auto& term : ops.ar) {
      const std::size_t lag = static_cast<std::size_t>(term.lag);
      if (lag <= t) value += term.coeff * (z[t - lag] - coeffs.intercept);
    }
    for (const auto& term : ops.ma) {
      const std::size_t lag = static_cast<std::size_t>(term.lag);
      if (lag <= t) value += term.coeff * eps[t - lag];
    }
    z[t] = value;
  }
  z.erase(z.begin(), z.begin() + burn);

  // Seasonal integration first, undoing the seasonal differences, then the
  // trend integration.
  for (int j = 0; j < order.D; ++j) {
    const std::size_t s = static_cast<std::size_t>(order.s);
    for (std::size_t t = s; t < z.size(); ++t) z[t] += z[t - s];
  }
  for (int i = 0; i < order.d; ++i)
    for (std::size_t t = 1; t < z.size(); ++t) z[t] += z[t - 1];
  return z;
}

std::pair<std::vector<double>, std::vector<double>> train_test_split(
    std::span<const double> series, double train_fraction) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw ValidationError("train_test_split: fraction must lie in (0, 1)");
  const std::size_t n = series.size();
  const std::size_t cut = static_cast<std::size_t>(
      std::floor(static_cast<double>(n) * train_fraction));
  if (cut < 1 || cut >= n)
    throw DataError("train_test_split: degenerate split for n = " +
                    std::to_string(n));
  return {std::vector<double>(series.begin(),
                              series.begin() + static_cast<std::ptrdiff_t>(cut)),
          std::vector<double>(series.begin() + static_cast<std::ptrdiff_t>(cut),
                              series.end())};
}

}  // namespace pestpulse::sarima
