#pragma once

#include "dfp/panel.hpp"

namespace dfp {

/// Centred log-ratio transform: log density minus its quadrature mean,
/// so the result integrates to zero.  Requires strictly positive values.
ClrCurve clr(const DensityCurve& curve);

/// Inverse transform onto a density integrating to `radix`.  Constant
/// shifts of the input map to the same density.
DensityCurve inv_clr(const ClrCurve& curve, double radix = 1e5);

ClrPanel clr_panel(const DensityPanel& panel);

}  // namespace dfp
