#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dfp/panel.hpp"

namespace dfp {

/// Thrown when the (state, gender, year) x age cross-classification has gaps
/// or inconsistent age sets.  The message lists the offending cells.
class RectangularityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LoadedPanel {
  DensityPanel panel;
  /// Mirror of the panel blocks holding death probabilities, present only
  /// when the source file had a qx column.
  std::vector<MatrixXd> qx;
  bool has_qx = false;
};

/// Reads long-format rows `state,gender,year,age,dx[,qx]` (header required)
/// into a rectangular panel.  Every (state, gender, year) cell must appear
/// with the identical age set; duplicates and gaps are errors.  Curves are
/// linearly interpolated onto `target_grid` when given (clamped outside the
/// source range) and normalised so each integrates to `radix`.
LoadedPanel load_panel(std::istream& in,
                       const std::optional<AgeGrid>& target_grid = std::nullopt,
                       double radix = 1e5);
LoadedPanel load_panel_file(const std::string& path,
                            const std::optional<AgeGrid>& target_grid = std::nullopt,
                            double radix = 1e5);

/// Replaces non-positive death counts.  With qx given, rebuilds the whole
/// curve by the life-table recursion d_i = l_i q_i starting from l_1 = radix;
/// the result is not renormalised.  Without qx, non-positive entries become
/// eps = 1e-5 * radix / p and the curve is rescaled to integrate to radix
/// again.  Idempotent on already repaired curves.
DensityCurve repair_zero_counts(const DensityCurve& curve,
                                const std::optional<VectorXd>& qx = std::nullopt);

/// Applies repair_zero_counts cell by cell and renormalises every curve to
/// the panel radix, so downstream log transforms are well defined.
DensityPanel repair_panel(const LoadedPanel& loaded);

/// Gini concentration of the age at death implied by the density.
/// Invariant under rescaling of the values; requires positive mean age.
double gini_coefficient(const DensityCurve& curve);

/// CSV rows `state,gender,year,gini` for every cell of the panel.
void write_gini_summary(std::ostream& out, const DensityPanel& panel);

}  // namespace dfp
