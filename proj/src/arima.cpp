#include "dfp/arima.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace dfp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRootMargin = 1e-4;  // keep roots clearly outside the unit circle
constexpr double kPenalty = 1e30;

VectorXd difference(const Eigen::Ref<const VectorXd>& y, int d) {
  VectorXd w = y;
  for (int k = 0; k < d; ++k) {
    if (w.size() < 2) throw std::invalid_argument("difference: series too short");
    w = (w.tail(w.size() - 1) - w.head(w.size() - 1)).eval();
  }
  return w;
}

// Smallest root modulus of a_0 + a_1 z + ... + a_n z^n via the companion
// matrix; an (effectively) constant polynomial has no roots.
double min_root_modulus(VectorXd poly) {
  Index n = poly.size() - 1;
  while (n > 0 && std::abs(poly(n)) < 1e-12) --n;
  if (n == 0) return kInf;
  MatrixXd c = MatrixXd::Zero(n, n);
  for (Index i = 1; i < n; ++i) c(i, i - 1) = 1.0;
  for (Index i = 0; i < n; ++i) c(i, n - 1) = -poly(i) / poly(n);
  Eigen::EigenSolver<MatrixXd> es(c, false);
  return es.eigenvalues().cwiseAbs().minCoeff();
}

struct CssSpec {
  int p = 0, q = 0;
  bool intercept = false;
  int nparam() const { return p + q + (intercept ? 1 : 0); }
};

// How far the AR or MA polynomial roots sit inside the required region.
double root_excess(const CssSpec& s, const VectorXd& th) {
  const int off = s.intercept ? 1 : 0;
  double excess = 0.0;
  if (s.p > 0) {
    VectorXd poly(s.p + 1);
    poly(0) = 1.0;
    for (int i = 1; i <= s.p; ++i) poly(i) = -th(off + i - 1);
    excess += std::max(0.0, 1.0 + kRootMargin - min_root_modulus(poly));
  }
  if (s.q > 0) {
    VectorXd poly(s.q + 1);
    poly(0) = 1.0;
    for (int j = 1; j <= s.q; ++j) poly(j) = th(off + s.p + j - 1);
    excess += std::max(0.0, 1.0 + kRootMargin - min_root_modulus(poly));
  }
  return excess;
}

// Conditional sum of squares; residuals before index p are treated as zero.
double css_value(const VectorXd& w, const CssSpec& s, const VectorXd& th, VectorXd* resid_out) {
  const Index n = w.size();
  const double psi = s.intercept ? th(0) : 0.0;
  const int off = s.intercept ? 1 : 0;
  VectorXd resid = VectorXd::Zero(n);
  double css = 0.0;
  for (Index t = s.p; t < n; ++t) {
    double acc = w(t) - psi;
    for (int i = 1; i <= s.p; ++i) acc -= th(off + i - 1) * w(t - i);
    for (int j = 1; j <= s.q; ++j)
      if (t - j >= s.p) acc -= th(off + s.p + j - 1) * resid(t - j);
    resid(t) = acc;
    css += acc * acc;
  }
  if (resid_out) *resid_out = resid;
  return css;
}

double css_objective(const VectorXd& w, const CssSpec& s, const VectorXd& th) {
  const double excess = root_excess(s, th);
  if (excess > 0.0) return kPenalty * (1.0 + excess);
  return css_value(w, s, th, nullptr);
}

// Derivative-free simplex minimiser; deterministic for fixed inputs.
VectorXd nelder_mead(const std::function<double(const VectorXd&)>& fn, const VectorXd& x0,
                     const VectorXd& step, int max_iter, double ftol) {
  const int n = static_cast<int>(x0.size());
  if (n == 0) return x0;
  std::vector<VectorXd> x(n + 1, x0);
  std::vector<double> f(n + 1);
  for (int i = 1; i <= n; ++i) x[i](i - 1) += step(i - 1);
  for (int i = 0; i <= n; ++i) f[i] = fn(x[i]);

  std::vector<int> order(n + 1);
  for (int it = 0; it < max_iter; ++it) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return f[a] < f[b]; });
    std::vector<VectorXd> xs(n + 1);
    std::vector<double> fs(n + 1);
    for (int i = 0; i <= n; ++i) {
      xs[i] = x[order[i]];
      fs[i] = f[order[i]];
    }
    x.swap(xs);
    f.swap(fs);
    if (f[n] - f[0] <= ftol * (std::abs(f[0]) + ftol)) break;

    VectorXd centroid = VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) centroid += x[i];
    centroid /= n;

    const VectorXd xr = centroid + (centroid - x[n]);
    const double fr = fn(xr);
    if (fr < f[0]) {
      const VectorXd xe = centroid + 2.0 * (centroid - x[n]);
      const double fe = fn(xe);
      if (fe < fr) {
        x[n] = xe;
        f[n] = fe;
      } else {
        x[n] = xr;
        f[n] = fr;
      }
    } else if (fr < f[n - 1]) {
      x[n] = xr;
      f[n] = fr;
    } else {
      const VectorXd xc = centroid + 0.5 * ((fr < f[n] ? xr : x[n]) - centroid);
      const double fc = fn(xc);
      if (fc < std::min(fr, f[n])) {
        x[n] = xc;
        f[n] = fc;
      } else {
        for (int i = 1; i <= n; ++i) {
          x[i] = x[0] + 0.5 * (x[i] - x[0]);
          f[i] = fn(x[i]);
        }
      }
    }
  }
  int best = 0;
  for (int i = 1; i <= n; ++i)
    if (f[i] < f[best]) best = i;
  return x[best];
}

VectorXd ols_solve(const MatrixXd& X, const VectorXd& y) {
  return X.colPivHouseholderQr().solve(y);
}

// Long autoregression residuals used to seed the moving-average part.
VectorXd long_ar_residuals(const VectorXd& w) {
  const Index n = w.size();
  const Index L = std::max<Index>(1, std::min<Index>(10, n / 3));
  if (n - L < L + 2) return VectorXd::Zero(n);
  MatrixXd X(n - L, L + 1);
  VectorXd y(n - L);
  for (Index t = L; t < n; ++t) {
    X(t - L, 0) = 1.0;
    for (Index i = 1; i <= L; ++i) X(t - L, i) = w(t - i);
    y(t - L) = w(t);
  }
  const VectorXd beta = ols_solve(X, y);
  VectorXd resid = VectorXd::Zero(n);
  resid.tail(n - L) = y - X * beta;
  return resid;
}

VectorXd shrink_to_valid(const CssSpec& s, VectorXd th) {
  const int off = s.intercept ? 1 : 0;
  for (int it = 0; it < 200 && root_excess(s, th) > 0.0; ++it)
    th.tail(th.size() - off) *= 0.95;
  if (root_excess(s, th) > 0.0) th.tail(th.size() - off).setZero();
  return th;
}

VectorXd pack_params(const ArimaFit& f) {
  const int off = f.with_intercept ? 1 : 0;
  VectorXd th(off + f.p + f.q);
  if (f.with_intercept) th(0) = f.intercept;
  for (int i = 0; i < f.p; ++i) th(off + i) = f.ar(i);
  for (int j = 0; j < f.q; ++j) th(off + f.p + j) = f.ma(j);
  return th;
}

// Smallest root modulus across the fitted AR and MA polynomials.
double min_fit_root(const ArimaFit& f) {
  double m = kInf;
  if (f.p > 0) {
    VectorXd poly(f.p + 1);
    poly(0) = 1.0;
    for (int i = 1; i <= f.p; ++i) poly(i) = -f.ar(i - 1);
    m = std::min(m, min_root_modulus(poly));
  }
  if (f.q > 0) {
    VectorXd poly(f.q + 1);
    poly(0) = 1.0;
    for (int j = 1; j <= f.q; ++j) poly(j) = f.ma(j - 1);
    m = std::min(m, min_root_modulus(poly));
  }
  return m;
}

}  // namespace

double kpss_statistic(const Eigen::Ref<const VectorXd>& series) {
  const Index T = series.size();
  if (T < 10) throw std::invalid_argument("kpss_statistic: need at least 10 observations");
  const VectorXd e = series.array() - series.mean();
  if (e.cwiseAbs().maxCoeff() == 0.0) return 0.0;

  double cum = 0.0, num = 0.0;
  for (Index t = 0; t < T; ++t) {
    cum += e(t);
    num += cum * cum;
  }
  num /= static_cast<double>(T) * static_cast<double>(T);

  const int b = static_cast<int>(std::floor(4.0 * std::pow(static_cast<double>(T) / 100.0, 0.25)));
  double lrv = e.squaredNorm() / static_cast<double>(T);
  for (int l = 1; l <= b && l < T; ++l) {
    const double g = e.tail(T - l).dot(e.head(T - l)) / static_cast<double>(T);
    lrv += 2.0 * (1.0 - static_cast<double>(l) / (b + 1.0)) * g;
  }
  lrv = std::max(lrv, 1e-12 * e.squaredNorm() / static_cast<double>(T));
  return num / lrv;
}

ArimaFit fit_arima(const Eigen::Ref<const VectorXd>& series, int p, int d, int q,
                   bool with_intercept) {
  if (p < 0 || d < 0 || q < 0) throw std::invalid_argument("fit_arima: negative order");
  const VectorXd w = difference(series, d);
  const Index n = w.size();
  const Index n_eff = n - p;
  const int m = p + q + 1 + (with_intercept ? 1 : 0);
  if (n_eff < std::max(1, p + q + (with_intercept ? 1 : 0)))
    throw std::invalid_argument("fit_arima: series too short for order (" + std::to_string(p) +
                                "," + std::to_string(d) + "," + std::to_string(q) + ")");

  const CssSpec spec{p, q, with_intercept};
  const int off = with_intercept ? 1 : 0;
  VectorXd th = VectorXd::Zero(spec.nparam());

  if (p == 0 && q == 0) {
    if (with_intercept) th(0) = w.mean();
  } else if (q == 0) {
    // Pure AR: conditional least squares is an ordinary regression.
    MatrixXd X(n - p, p + off);
    VectorXd y(n - p);
    for (Index t = p; t < n; ++t) {
      if (with_intercept) X(t - p, 0) = 1.0;
      for (int i = 1; i <= p; ++i) X(t - p, off + i - 1) = w(t - i);
      y(t - p) = w(t);
    }
    th = ols_solve(X, y);
    if (root_excess(spec, th) > 0.0) {
      th = shrink_to_valid(spec, th);
      VectorXd step = VectorXd::Constant(th.size(), 0.05);
      th = nelder_mead([&](const VectorXd& v) { return css_objective(w, spec, v); }, th, step,
                       400 * spec.nparam(), 1e-12);
    }
  } else {
    // Seed via a long AR approximation, then refine the conditional sum of
    // squares with a simplex search from that point and from zero.
    const VectorXd eps = long_ar_residuals(w);
    const Index t0 = std::max<Index>(p, q);
    VectorXd init = VectorXd::Zero(spec.nparam());
    if (with_intercept) init(0) = w.mean();
    if (n - t0 >= spec.nparam() + 2) {
      MatrixXd X(n - t0, spec.nparam());
      VectorXd y(n - t0);
      for (Index t = t0; t < n; ++t) {
        Index col = 0;
        if (with_intercept) X(t - t0, col++) = 1.0;
        for (int i = 1; i <= p; ++i) X(t - t0, col++) = w(t - i);
        for (int j = 1; j <= q; ++j) X(t - t0, col++) = (t - j >= 0) ? eps(t - j) : 0.0;
        y(t - t0) = w(t);
      }
      init = ols_solve(X, y);
    }
    init = shrink_to_valid(spec, init);

    VectorXd zero = VectorXd::Zero(spec.nparam());
    if (with_intercept) zero(0) = w.mean();

    const auto obj = [&](const VectorXd& v) { return css_objective(w, spec, v); };
    VectorXd step = VectorXd::Constant(spec.nparam(), 0.1);
    if (with_intercept) step(0) = std::max(0.1, 0.1 * std::abs(w.mean()));
    const VectorXd a = nelder_mead(obj, init, step, 400 * spec.nparam(), 1e-12);
    const VectorXd b = nelder_mead(obj, zero, step, 400 * spec.nparam(), 1e-12);
    th = obj(a) <= obj(b) ? a : b;
  }

  if (root_excess(spec, th) > 0.0)
    throw std::runtime_error("fit_arima: no admissible parameters for order (" +
                             std::to_string(p) + "," + std::to_string(d) + "," +
                             std::to_string(q) + ")");

  ArimaFit fit;
  fit.p = p;
  fit.d = d;
  fit.q = q;
  fit.with_intercept = with_intercept;
  if (with_intercept) fit.intercept = th(0);
  fit.ar = th.segment(off, p);
  fit.ma = th.segment(off + p, q);

  const double css = css_value(w, spec, th, nullptr);
  fit.sigma2 = css / static_cast<double>(n_eff);
  const double s2 = std::max(fit.sigma2, 1e-300);
  // The likelihood proxy spans the full differenced length regardless of p,
  // otherwise candidates that condition away more residuals gain a spurious
  // per-observation bonus and AICc values stop being comparable.
  fit.loglik = -0.5 * static_cast<double>(n) * (std::log(2.0 * M_PI * s2) + 1.0);
  const double denom = static_cast<double>(n) - m - 1.0;
  fit.aicc = denom > 0.0
                 ? -2.0 * fit.loglik + 2.0 * m + 2.0 * m * (m + 1.0) / denom
                 : kInf;
  return fit;
}

ArimaFit auto_arima(const Eigen::Ref<const VectorXd>& series, int max_p, int max_q, int max_d) {
  const Index n0 = series.size();
  int d_cap = -1;
  for (int dd = 0; dd <= max_d; ++dd)
    if (n0 - dd >= 10) d_cap = dd;
  if (d_cap < 0) throw std::invalid_argument("auto_arima: need at least 10 observations");

  int d = -1;
  for (int dd = 0; dd <= d_cap; ++dd) {
    if (kpss_statistic(difference(series, dd)) <= kKpssCritical5) {
      d = dd;
      break;
    }
  }
  if (d < 0) d = d_cap;
  const bool intercept = d <= 1;

  ArimaFit best;
  best.aicc = kInf;
  bool have = false;
  for (int total = 0; total <= max_p + max_q; ++total)
    for (int p = std::max(0, total - max_q); p <= std::min(total, max_p); ++p) {
      const int q = total - p;
      ArimaFit cand;
      try {
        cand = fit_arima(series, p, d, q, intercept);
      } catch (const std::exception&) {
        continue;
      }
      if (!std::isfinite(cand.aicc)) continue;
      // Fits whose roots hug the unit circle have carved a spectral spike
      // out of noise; their conditional sum of squares undercuts honest
      // candidates, so they are not comparable and get dropped.
      if (min_fit_root(cand) < 1.01) continue;
      if (!have || cand.aicc < best.aicc) {
        best = cand;
        have = true;
      }
    }
  if (have) return best;

  // Nothing admissible: fall back to a random walk with drift.
  const VectorXd w = difference(series, 1);
  ArimaFit fb;
  fb.d = 1;
  fb.with_intercept = true;
  fb.intercept = w.mean();
  fb.sigma2 = (w.array() - fb.intercept).square().sum() / static_cast<double>(w.size());
  fb.loglik = 0.0;
  fb.aicc = kInf;
  fb.fallback = true;
  return fb;
}

ScoreForecast forecast_scores(const ArimaFit& fit, const Eigen::Ref<const VectorXd>& series,
                              int horizon) {
  if (horizon < 1) throw std::domain_error("forecast_scores: horizon must be at least 1");
  std::vector<VectorXd> stages{VectorXd(series)};
  for (int k = 0; k < fit.d; ++k) stages.push_back(difference(stages.back(), 1));
  const VectorXd& w = stages.back();
  const Index n = w.size();
  if (n <= fit.p)
    throw std::invalid_argument("forecast_scores: series too short for the fitted order");

  const CssSpec spec{fit.p, fit.q, fit.with_intercept};
  VectorXd resid;
  css_value(w, spec, pack_params(fit), &resid);

  std::vector<double> hist(w.data(), w.data() + n);
  std::vector<double> rhist(resid.data(), resid.data() + n);
  for (int h = 1; h <= horizon; ++h) {
    const Index t = n - 1 + h;
    double acc = fit.with_intercept ? fit.intercept : 0.0;
    for (int i = 1; i <= fit.p; ++i) acc += fit.ar(i - 1) * hist[t - i];
    for (int j = 1; j <= fit.q; ++j) {
      const Index idx = t - j;
      if (idx < n && idx >= spec.p) acc += fit.ma(j - 1) * rhist[idx];
    }
    hist.push_back(acc);
    rhist.push_back(0.0);
  }

  VectorXd fc(horizon);
  for (int h = 0; h < horizon; ++h) fc(h) = hist[n + h];
  // Undo each differencing stage by cumulative sums from its last level.
  for (int k = fit.d - 1; k >= 0; --k) {
    double last = stages[k](stages[k].size() - 1);
    for (int h = 0; h < horizon; ++h) {
      last += fc(h);
      fc(h) = last;
    }
  }
  return ScoreForecast{std::move(fc), fit};
}

}  // namespace dfp
