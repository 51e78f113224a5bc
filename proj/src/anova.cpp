#include "dfp/anova.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace dfp {
namespace {

// Median with the midpoint convention for even counts.  Reorders buf.
double median_inplace(std::vector<double>& buf) {
  const size_t n = buf.size();
  const auto mid = buf.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(buf.begin(), mid, buf.end());
  if (n % 2 == 1) return *mid;
  const double hi = *mid;
  const double lo = *std::max_element(buf.begin(), mid);
  return 0.5 * (lo + hi);
}

}  // namespace

VectorXd AnovaFit::deterministic(Index s, Gender g) const {
  return mu + alpha.row(s).transpose() + beta.row(static_cast<int>(g)).transpose();
}

AnovaFit fm_anova(const ClrPanel& panel) {
  const Index ns = panel.n_states(), T = panel.n_years(), p = panel.n_ages();
  AnovaFit fit;
  fit.method = AnovaMethod::FM;
  fit.residuals = panel;

  fit.mu = VectorXd::Zero(p);
  for (Index s = 0; s < ns; ++s)
    for (Gender g : kGenders) fit.mu += panel.block(s, g).colwise().sum().transpose();
  fit.mu /= static_cast<double>(2 * ns * T);

  fit.alpha.resize(ns, p);
  for (Index s = 0; s < ns; ++s)
    fit.alpha.row(s) =
        (panel.block(s, Gender::Female) + panel.block(s, Gender::Male)).colwise().sum() /
            static_cast<double>(2 * T) -
        fit.mu.transpose();

  fit.beta.resize(2, p);
  for (Gender g : kGenders) {
    RowVectorXd acc = RowVectorXd::Zero(p);
    for (Index s = 0; s < ns; ++s) acc += panel.block(s, g).colwise().sum();
    fit.beta.row(static_cast<int>(g)) = acc / static_cast<double>(ns * T) - fit.mu.transpose();
  }

  for (Index s = 0; s < ns; ++s)
    for (Gender g : kGenders)
      fit.residuals.block(s, g).rowwise() -= fit.deterministic(s, g).transpose();
  return fit;
}

AnovaFit fmp_anova(const ClrPanel& panel, double tol, int max_iter) {
  const Index ns = panel.n_states(), T = panel.n_years(), p = panel.n_ages();
  AnovaFit fit;
  fit.method = AnovaMethod::FMP;
  fit.residuals = panel;
  fit.mu = VectorXd::Zero(p);
  fit.alpha = MatrixXd::Zero(ns, p);
  fit.beta = MatrixXd::Zero(2, p);
  fit.converged = false;

  if (tol < 0) {
    double lo = panel.block(0, Gender::Female).minCoeff();
    double hi = panel.block(0, Gender::Female).maxCoeff();
    for (Index s = 0; s < ns; ++s)
      for (Gender g : kGenders) {
        lo = std::min(lo, panel.block(s, g).minCoeff());
        hi = std::max(hi, panel.block(s, g).maxCoeff());
      }
    tol = (hi > lo) ? 1e-8 * (hi - lo) : 1e-12;
  }

  std::vector<double> buf;
  auto recentre_beta = [&] {
    for (Index j = 0; j < p; ++j) {
      const double m = 0.5 * (fit.beta(0, j) + fit.beta(1, j));
      fit.mu(j) += m;
      fit.beta(0, j) -= m;
      fit.beta(1, j) -= m;
    }
  };
  auto recentre_alpha = [&] {
    for (Index j = 0; j < p; ++j) {
      buf.assign(fit.alpha.col(j).data(), fit.alpha.col(j).data() + ns);
      const double m = median_inplace(buf);
      fit.mu(j) += m;
      fit.alpha.col(j).array() -= m;
    }
  };

  for (int iter = 0; iter < max_iter; ++iter) {
    // State sweep: per state and grid point, the median over the pooled
    // gender x year replicates moves into alpha.
    double adj_row = 0.0;
    for (Index s = 0; s < ns; ++s) {
      MatrixXd& f = fit.residuals.block(s, Gender::Female);
      MatrixXd& m = fit.residuals.block(s, Gender::Male);
      for (Index j = 0; j < p; ++j) {
        buf.assign(f.col(j).data(), f.col(j).data() + T);
        buf.insert(buf.end(), m.col(j).data(), m.col(j).data() + T);
        const double med = median_inplace(buf);
        fit.alpha(s, j) += med;
        f.col(j).array() -= med;
        m.col(j).array() -= med;
        adj_row = std::max(adj_row, std::abs(med));
      }
    }
    if (adj_row > tol) ++fit.iterations;
    recentre_beta();

    // Gender sweep: median over the pooled state x year replicates.
    double adj_col = 0.0;
    for (Gender g : kGenders) {
      for (Index j = 0; j < p; ++j) {
        buf.clear();
        for (Index s = 0; s < ns; ++s) {
          const MatrixXd& blk = fit.residuals.block(s, g);
          buf.insert(buf.end(), blk.col(j).data(), blk.col(j).data() + T);
        }
        const double med = median_inplace(buf);
        fit.beta(static_cast<int>(g), j) += med;
        for (Index s = 0; s < ns; ++s) fit.residuals.block(s, g).col(j).array() -= med;
        adj_col = std::max(adj_col, std::abs(med));
      }
    }
    if (adj_col > tol) ++fit.iterations;
    recentre_alpha();

    if (std::max(adj_row, adj_col) <= tol) {
      fit.converged = true;
      break;
    }
  }
  // The invariants hold regardless of early exit.
  recentre_beta();
  recentre_alpha();
  return fit;
}

ClrPanel reconstruct(const AnovaFit& fit) {
  ClrPanel out = fit.residuals;
  for (Index s = 0; s < out.n_states(); ++s)
    for (Gender g : kGenders) out.block(s, g).rowwise() += fit.deterministic(s, g).transpose();
  return out;
}

}  // namespace dfp
