#pragma once

#include "dfp/panel.hpp"

namespace dfp {

/// Symmetrised Kullback-Leibler divergence between two densities on the
/// same grid.  Inputs are rescaled to probability vectors first, so the
/// radix does not matter.  Strictly positive cells are required.
double kld(const DensityCurve& d, const DensityCurve& dhat);

/// Symmetrised Jensen-Shannon divergence with the geometric-mean midpoint;
/// identically one quarter of kld.
double jsd(const DensityCurve& d, const DensityCurve& dhat);

}  // namespace dfp
