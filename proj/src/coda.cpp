#include "dfp/coda.hpp"

#include <stdexcept>

namespace dfp {

ClrCurve clr(const DensityCurve& curve) {
  if (curve.values.size() != curve.grid.size())
    throw std::invalid_argument("clr: values do not match the grid");
  if (!(curve.values.minCoeff() > 0.0))
    throw std::domain_error("clr: density has non-positive cells, repair zero counts first");
  VectorXd logd = curve.values.array().log();
  logd.array() -= curve.grid.integrate(logd) / curve.grid.span();
  return ClrCurve{curve.grid, std::move(logd)};
}

DensityCurve inv_clr(const ClrCurve& curve, double radix) {
  if (curve.values.size() != curve.grid.size())
    throw std::invalid_argument("inv_clr: values do not match the grid");
  if (!curve.values.allFinite()) throw std::domain_error("inv_clr: non-finite input");
  // Shift by the maximum before exponentiating; the normalisation divides
  // the shift out again, so overflow is avoided without changing the result.
  const VectorXd e = (curve.values.array() - curve.values.maxCoeff()).exp();
  return DensityCurve{curve.grid, e * (radix / curve.grid.integrate(e)), radix};
}

ClrPanel clr_panel(const DensityPanel& panel) {
  ClrPanel out(panel.grid(), panel.states(), panel.years());
  for (Index s = 0; s < panel.n_states(); ++s)
    for (Gender g : kGenders)
      for (Index t = 0; t < panel.n_years(); ++t)
        out.block(s, g).row(t) = clr(panel.curve(s, g, t)).values.transpose();
  return out;
}

}  // namespace dfp
