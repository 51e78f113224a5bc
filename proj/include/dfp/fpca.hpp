#pragma once

#include "dfp/longrun.hpp"

namespace dfp {

/// Component count rule: eigenvalue-ratio selection or a fixed K.
struct KRule {
  static KRule evr() { return KRule{}; }
  static KRule fixed(int k) {
    KRule r;
    r.is_fixed = true;
    r.k = k;
    return r;
  }
  bool is_fixed = false;
  int k = 0;
};

/// Eigenvalue-ratio choice of the component count.  Candidates run up to
/// the number of eigenvalues at least the mean of the supplied spectrum;
/// ratios below the threshold 1/log(max(theta_1, T)) count as a unit
/// penalty so a vanishing tail still yields the smallest such K.
int select_K_evr(const Eigen::Ref<const VectorXd>& eigenvalues, Index T);

/// Functional principal components of a covariance surface under the grid
/// quadrature.  Eigenfunctions are quadrature-orthonormal, ordered by
/// decreasing eigenvalue (negatives clipped to zero), and signed so the
/// entry of largest magnitude is positive.
struct FpcaModel {
  AgeGrid grid;
  int stack = 1;
  VectorXd mean;         // stack * p
  VectorXd eigenvalues;  // full clipped spectrum, nonincreasing
  MatrixXd basis;        // (stack * p) x retained
  MatrixXd scores;       // T x retained
  int K = 0;             // rule output; retained = min(stack * K, rank)
  double bandwidth = 0.0;
  LagKernel kernel = LagKernel::Bartlett;

  Index retained() const { return basis.cols(); }
  /// mean + scores * basis^T, row per observation.
  MatrixXd reconstruct() const;
};

FpcaModel fpca(const CovSurface& cov, const Eigen::Ref<const MatrixXd>& series,
               const KRule& rule = KRule::evr());

/// Joint decomposition of the two gender blocks of one state: curves are
/// stacked on a doubled grid, the long-run covariance of the stacked series
/// is decomposed, and 2K components are retained so either block keeps its
/// K leading directions in the balanced case.
FpcaModel mfpca_stack(const AgeGrid& grid, const Eigen::Ref<const MatrixXd>& female,
                      const Eigen::Ref<const MatrixXd>& male, const KRule& rule = KRule::evr(),
                      LagKernel kernel = LagKernel::Bartlett,
                      std::optional<double> bandwidth = std::nullopt);

}  // namespace dfp
