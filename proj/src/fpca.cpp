#include "dfp/fpca.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace dfp {

int select_K_evr(const Eigen::Ref<const VectorXd>& eigenvalues, Index T) {
  const Index n = eigenvalues.size();
  if (n < 1) throw std::invalid_argument("select_K_evr: empty spectrum");
  if (T < 2) throw std::invalid_argument("select_K_evr: need T >= 2");
  const double theta1 = eigenvalues(0);
  if (!(theta1 > 0.0)) throw std::domain_error("select_K_evr: spectrum has no positive mass");

  const double mean = eigenvalues.sum() / static_cast<double>(n);
  Index kmax = 0;
  for (Index i = 0; i < n; ++i)
    if (eigenvalues(i) >= mean) ++kmax;

  const double delta = 1.0 / std::log(std::max(theta1, static_cast<double>(T)));
  int best = 1;
  double best_val = std::numeric_limits<double>::infinity();
  for (Index k = 1; k <= kmax; ++k) {
    const double num = (k < n) ? eigenvalues(k) : 0.0;
    const double ratio = num / eigenvalues(k - 1);
    const double val = (ratio >= delta ? ratio : 0.0) + (ratio <= delta ? 1.0 : 0.0);
    if (val < best_val) {
      best_val = val;
      best = static_cast<int>(k);
    }
  }
  return best;
}

MatrixXd FpcaModel::reconstruct() const {
  return (scores * basis.transpose()).rowwise() + mean.transpose();
}

FpcaModel fpca(const CovSurface& cov, const Eigen::Ref<const MatrixXd>& series,
               const KRule& rule) {
  const Index p = cov.grid.size();
  const Index dim = static_cast<Index>(cov.stack) * p;
  if (cov.values.rows() != dim || cov.values.cols() != dim)
    throw std::invalid_argument("fpca: covariance surface does not match grid and stack");
  if (series.cols() != dim)
    throw std::invalid_argument("fpca: series width does not match the covariance surface");
  const Index T = series.rows();
  if (T < 1) throw std::invalid_argument("fpca: empty series");
  if (rule.is_fixed && rule.k < 1) throw std::invalid_argument("fpca: fixed K must be positive");

  VectorXd w(dim);
  for (int b = 0; b < cov.stack; ++b) w.segment(b * p, p) = cov.grid.weights();
  const VectorXd sq = w.cwiseSqrt();

  MatrixXd B = sq.asDiagonal() * cov.values * sq.asDiagonal();
  B = 0.5 * (B + B.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(B);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("fpca: eigensolver failed on a " + std::to_string(dim) + "x" +
                             std::to_string(dim) + " surface with norm " +
                             std::to_string(B.norm()));

  // Eigen reports ascending order; flip, clip negatives, map back through
  // the quadrature so the eigenfunctions are orthonormal under it.
  FpcaModel model;
  model.grid = cov.grid;
  model.stack = cov.stack;
  model.eigenvalues.resize(dim);
  MatrixXd funcs(dim, dim);
  for (Index r = 0; r < dim; ++r) {
    const Index src = dim - 1 - r;
    model.eigenvalues(r) = std::max(0.0, es.eigenvalues()(src));
    VectorXd f = es.eigenvectors().col(src).cwiseQuotient(sq);
    Index imax = 0;
    f.cwiseAbs().maxCoeff(&imax);
    funcs.col(r) = f(imax) < 0 ? VectorXd(-f) : f;
  }

  // A spectrum without positive mass means the series has no variation to
  // decompose; keep one direction so callers still get zero scores.
  if (rule.is_fixed)
    model.K = static_cast<int>(std::min<Index>(rule.k, dim));
  else
    model.K = model.eigenvalues(0) > 0.0 ? select_K_evr(model.eigenvalues, std::max<Index>(T, 2))
                                         : 1;

  Index rank = 0;
  for (Index r = 0; r < dim; ++r)
    if (model.eigenvalues(r) > 0.0) ++rank;
  const Index retained =
      std::max<Index>(1, std::min<Index>(static_cast<Index>(cov.stack) * model.K, rank));

  model.basis = funcs.leftCols(retained);
  model.mean = series.colwise().mean().transpose();
  model.scores = (series.rowwise() - model.mean.transpose()) * w.asDiagonal() * model.basis;
  return model;
}

FpcaModel mfpca_stack(const AgeGrid& grid, const Eigen::Ref<const MatrixXd>& female,
                      const Eigen::Ref<const MatrixXd>& male, const KRule& rule, LagKernel kernel,
                      std::optional<double> bandwidth) {
  if (female.rows() != male.rows())
    throw std::invalid_argument("mfpca_stack: gender blocks cover different year counts");
  if (female.cols() != grid.size() || male.cols() != grid.size())
    throw std::invalid_argument("mfpca_stack: block width does not match the grid");
  MatrixXd stacked(female.rows(), 2 * grid.size());
  stacked << female, male;
  double b = 0.0;
  const CovSurface cov = longrun_cov(grid, stacked, kernel, bandwidth, 2, &b);
  FpcaModel model = fpca(cov, stacked, rule);
  model.kernel = kernel;
  model.bandwidth = b;
  return model;
}

}  // namespace dfp
