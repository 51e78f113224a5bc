#pragma once

#include "dfp/grid.hpp"

namespace dfp {

/// KPSS level-stationarity statistic with the Bartlett long-run variance
/// at bandwidth floor(4 (T/100)^(1/4)).  Large values reject stationarity;
/// the 5% critical value is kKpssCritical5.
double kpss_statistic(const Eigen::Ref<const VectorXd>& series);

inline constexpr double kKpssCritical5 = 0.463;

/// ARIMA(p, d, q) fitted by conditional sum of squares on the d-times
/// differenced series.  AR roots lie outside the unit circle; MA roots are
/// kept invertible so the residual recursion is stable.
struct ArimaFit {
  int p = 0, d = 0, q = 0;
  VectorXd ar;             // tau_1..tau_p
  VectorXd ma;             // nu_1..nu_q
  double intercept = 0.0;  // mean shift of the differenced series
  bool with_intercept = false;
  double sigma2 = 0.0;
  double loglik = 0.0;
  double aicc = 0.0;
  bool fallback = false;  // random walk with drift used because every candidate failed
};

ArimaFit fit_arima(const Eigen::Ref<const VectorXd>& series, int p, int d, int q,
                   bool with_intercept);

/// Order selection: d is the smallest value whose differenced series passes
/// the KPSS test at 5% (capped at max_d), then all (p, q) up to the caps are
/// fitted and ranked by AICc.  An intercept is included while d <= 1.  Ties
/// resolve to the smaller model; if nothing fits, a random walk with drift
/// is returned with the fallback flag set.
ArimaFit auto_arima(const Eigen::Ref<const VectorXd>& series, int max_p = 3, int max_q = 3,
                    int max_d = 2);

struct ScoreForecast {
  VectorXd values;  // point forecasts for horizons 1..H
  ArimaFit fit;
};

/// Iterated conditional-mean forecasts on the differenced scale, undone by
/// cumulative sums back to the level of the series.
ScoreForecast forecast_scores(const ArimaFit& fit, const Eigen::Ref<const VectorXd>& series,
                              int horizon);

}  // namespace dfp
