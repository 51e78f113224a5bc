#pragma once

#include "dfp/pipeline.hpp"

namespace dfp {

/// Two-stage competitor: per-series principal components first, then a
/// scalar factor model across states on each score panel, forecasting the
/// factors rather than the scores directly.
struct GsyConfig {
  int p0 = 6;  // components kept per state x gender series
  KRule r_rule = KRule::evr();
  LagKernel kernel = LagKernel::Bartlett;
  std::optional<double> bandwidth;
  int horizon = 10;
  bool use_clr = true;  // model clr curves; otherwise raw density values
  int threads = 1;
};

/// Cross-state factor model of one score panel (years x states).  Loadings
/// are eigenvectors of the column covariance, factors their projections.
struct ScoreFactorModel {
  RowVectorXd col_means;
  VectorXd eigenvalues;  // clipped, nonincreasing
  MatrixXd loadings;     // n_states x r
  MatrixXd factors;      // T x r
  int r = 0;
};

ScoreFactorModel fit_score_factors(const Eigen::Ref<const MatrixXd>& scores, const KRule& rule);

ForecastSet gsy_two_stage(const DensityPanel& panel, const GsyConfig& config);

}  // namespace dfp
