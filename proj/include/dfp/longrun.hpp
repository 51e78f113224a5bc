#pragma once

#include <optional>

#include "dfp/grid.hpp"

namespace dfp {

enum class LagKernel { Bartlett, FlatTop };

/// Kernel weight at scaled lag x = l / bandwidth.  Bartlett decays linearly
/// on [0, 1); the flat-top variant is 1 up to 1/2 and linear after.
double lag_weight(LagKernel kernel, double x);

/// Discretised covariance surface.  `stack` > 1 marks a block-stacked
/// surface whose rows repeat the base grid that many times.
struct CovSurface {
  AgeGrid grid;
  int stack = 1;
  MatrixXd values;
};

/// Empirical lag-l autocovariance of the rows of `series` (years x grid),
/// centred at the sample mean, with divisor T.  Negative lags transpose.
MatrixXd autocov_matrix(const Eigen::Ref<const MatrixXd>& series, int lag);

/// Kernel-weighted sum of autocovariances over all lags the bandwidth
/// reaches.  An absent bandwidth selects the plug-in rule.
MatrixXd longrun_cov_matrix(const Eigen::Ref<const MatrixXd>& series,
                            LagKernel kernel = LagKernel::Bartlett,
                            std::optional<double> bandwidth = std::nullopt,
                            double* bandwidth_out = nullptr);

/// Bandwidth from a Bartlett pilot smooth: the ratio of the first-order
/// to the zero-order kernel sums sets the scale, clamped to [1, T/4].
double plugin_bandwidth(const Eigen::Ref<const MatrixXd>& series);

CovSurface autocov(const AgeGrid& grid, const Eigen::Ref<const MatrixXd>& series, int lag,
                   int stack = 1);
CovSurface longrun_cov(const AgeGrid& grid, const Eigen::Ref<const MatrixXd>& series,
                       LagKernel kernel = LagKernel::Bartlett,
                       std::optional<double> bandwidth = std::nullopt, int stack = 1,
                       double* bandwidth_out = nullptr);

}  // namespace dfp
