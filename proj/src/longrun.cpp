#include "dfp/longrun.hpp"

#include <cmath>
#include <stdexcept>

namespace dfp {
namespace {

MatrixXd centred(const Eigen::Ref<const MatrixXd>& series) {
  return series.rowwise() - series.colwise().mean();
}

// gamma_l for l >= 0 from an already centred series.
MatrixXd gamma_from_centred(const MatrixXd& c, int l) {
  const Index T = c.rows();
  return c.topRows(T - l).transpose() * c.bottomRows(T - l) / static_cast<double>(T);
}

// Kernel sandwich sum_{|l| < cutoff} w(l) gamma_l, optionally scaling each
// term by |l| (used by the plug-in rule).
MatrixXd kernel_sum(const MatrixXd& c, LagKernel kernel, double bandwidth, bool lag_scaled) {
  const Index T = c.rows();
  MatrixXd acc = lag_scaled ? MatrixXd::Zero(c.cols(), c.cols()).eval()
                            : gamma_from_centred(c, 0).eval();
  for (int l = 1; l < T; ++l) {
    const double w = lag_weight(kernel, static_cast<double>(l) / bandwidth);
    if (w <= 0.0) break;
    const MatrixXd g = gamma_from_centred(c, l);
    acc += (lag_scaled ? w * l : w) * (g + g.transpose());
  }
  return acc;
}

}  // namespace

double lag_weight(LagKernel kernel, double x) {
  const double a = std::abs(x);
  switch (kernel) {
    case LagKernel::Bartlett:
      return a < 1.0 ? 1.0 - a : 0.0;
    case LagKernel::FlatTop:
      if (a <= 0.5) return 1.0;
      return a < 1.0 ? 2.0 * (1.0 - a) : 0.0;
  }
  return 0.0;
}

MatrixXd autocov_matrix(const Eigen::Ref<const MatrixXd>& series, int lag) {
  const Index T = series.rows();
  if (std::abs(lag) >= T)
    throw std::invalid_argument("autocov: |lag| must be smaller than the series length");
  const MatrixXd c = centred(series);
  const MatrixXd g = gamma_from_centred(c, std::abs(lag));
  return lag < 0 ? MatrixXd(g.transpose()) : g;
}

double plugin_bandwidth(const Eigen::Ref<const MatrixXd>& series) {
  const Index T = series.rows();
  const MatrixXd c = centred(series);
  const double pilot = std::max(2.0, std::floor(std::pow(static_cast<double>(T), 0.2)));
  const double n0 = kernel_sum(c, LagKernel::Bartlett, pilot, false).norm();
  const double n1 = kernel_sum(c, LagKernel::Bartlett, pilot, true).norm();
  if (!(n0 > 0.0)) return 1.0;
  double b = std::cbrt(1.5) * std::pow(n1 / n0, 2.0 / 3.0) *
             std::cbrt(static_cast<double>(T));
  return std::clamp(b, 1.0, static_cast<double>(T) / 4.0);
}

MatrixXd longrun_cov_matrix(const Eigen::Ref<const MatrixXd>& series, LagKernel kernel,
                            std::optional<double> bandwidth, double* bandwidth_out) {
  const Index T = series.rows();
  if (T < 2) throw std::invalid_argument("longrun_cov: need at least two observations");
  // The plug-in rule needs a little lag structure to read the scale from.
  if (!bandwidth && T < 4)
    throw std::invalid_argument("longrun_cov: plug-in bandwidth needs at least four observations");
  if (bandwidth && !(*bandwidth > 0.0))
    throw std::invalid_argument("longrun_cov: bandwidth must be positive");
  const double b = bandwidth ? *bandwidth : plugin_bandwidth(series);
  if (bandwidth_out) *bandwidth_out = b;
  const MatrixXd c = centred(series);
  MatrixXd lrc = kernel_sum(c, kernel, b, false);
  lrc = 0.5 * (lrc + lrc.transpose()).eval();
  return lrc;
}

CovSurface autocov(const AgeGrid& grid, const Eigen::Ref<const MatrixXd>& series, int lag,
                   int stack) {
  if (series.cols() != grid.size() * stack)
    throw std::invalid_argument("autocov: series width does not match grid and stack");
  return CovSurface{grid, stack, autocov_matrix(series, lag)};
}

CovSurface longrun_cov(const AgeGrid& grid, const Eigen::Ref<const MatrixXd>& series,
                       LagKernel kernel, std::optional<double> bandwidth, int stack,
                       double* bandwidth_out) {
  if (series.cols() != grid.size() * stack)
    throw std::invalid_argument("longrun_cov: series width does not match grid and stack");
  return CovSurface{grid, stack, longrun_cov_matrix(series, kernel, bandwidth, bandwidth_out)};
}

}  // namespace dfp
