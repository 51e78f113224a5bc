#pragma once

#include "dfp/panel.hpp"

namespace dfp {

enum class AnovaMethod { FM, FMP };

/// Additive decomposition of a clr panel into a common level, state and
/// gender effects, and a residual panel.  Reconstruction is exact for
/// both methods: block(s, g) == mu + alpha_s + beta_g + residual.
struct AnovaFit {
  AnovaMethod method = AnovaMethod::FM;
  VectorXd mu;      // p
  MatrixXd alpha;   // n_states x p
  MatrixXd beta;    // 2 x p, row order Female, Male
  ClrPanel residuals;
  int iterations = 0;   // median polish only: sweeps that moved the fit
  bool converged = true;

  /// Deterministic part mu + alpha_s + beta_g for one cell.
  VectorXd deterministic(Index s, Gender g) const;
};

/// Mean-based effects: alpha rows and beta rows each sum to zero and the
/// residuals average to zero over every state and every gender slice.
AnovaFit fm_anova(const ClrPanel& panel);

/// Tukey median polish applied pointwise across the grid, with year
/// replicates pooled inside each sweep.  Effects are recentred so the
/// state-wise and gender-wise medians vanish (even medians use the
/// midpoint).  tol < 0 selects 1e-8 times the panel value range.
AnovaFit fmp_anova(const ClrPanel& panel, double tol = -1.0, int max_iter = 50);

/// mu + alpha + beta + residuals, block by block.
ClrPanel reconstruct(const AnovaFit& fit);

}  // namespace dfp
