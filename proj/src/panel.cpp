#include "dfp/panel.hpp"

#include <stdexcept>

namespace dfp {

char gender_code(Gender g) { return g == Gender::Female ? 'F' : 'M'; }

Gender gender_from_code(char c) {
  if (c == 'F' || c == 'f') return Gender::Female;
  if (c == 'M' || c == 'm') return Gender::Male;
  throw std::invalid_argument(std::string("gender code must be F or M, got '") + c + "'");
}

CurvePanel::CurvePanel(AgeGrid grid, std::vector<std::string> states, std::vector<int> years)
    : grid_(std::move(grid)), states_(std::move(states)), years_(std::move(years)) {
  if (states_.empty()) throw std::invalid_argument("panel: need at least one state");
  if (years_.empty()) throw std::invalid_argument("panel: need at least one year");
  blocks_.assign(2 * states_.size(),
                 MatrixXd::Zero(static_cast<Index>(years_.size()), grid_.size()));
}

Index CurvePanel::state_index(std::string_view name) const {
  for (size_t i = 0; i < states_.size(); ++i)
    if (states_[i] == name) return static_cast<Index>(i);
  return -1;
}

ClrCurve ClrPanel::curve(Index s, Gender g, Index t) const {
  return ClrCurve{grid(), block(s, g).row(t).transpose()};
}

DensityPanel::DensityPanel(AgeGrid grid, std::vector<std::string> states, std::vector<int> years,
                           double radix)
    : CurvePanel(std::move(grid), std::move(states), std::move(years)), radix_(radix) {
  if (!(radix_ > 0)) throw std::invalid_argument("panel: radix must be positive");
}

DensityCurve DensityPanel::curve(Index s, Gender g, Index t) const {
  return DensityCurve{grid(), block(s, g).row(t).transpose(), radix_};
}

namespace {

template <typename PanelT>
PanelT subset_years_impl(const PanelT& panel, Index first, Index count, double* radix) {
  if (first < 0 || count < 1 || first + count > panel.n_years())
    throw std::invalid_argument("subset_years: range outside panel years");
  std::vector<int> years(panel.years().begin() + first, panel.years().begin() + first + count);
  PanelT out = [&] {
    if constexpr (std::is_same_v<PanelT, DensityPanel>)
      return DensityPanel(panel.grid(), panel.states(), years, *radix);
    else
      return ClrPanel(panel.grid(), panel.states(), years);
  }();
  for (Index s = 0; s < panel.n_states(); ++s)
    for (Gender g : kGenders) out.block(s, g) = panel.block(s, g).middleRows(first, count);
  return out;
}

}  // namespace

DensityPanel subset_years(const DensityPanel& panel, Index first, Index count) {
  double radix = panel.radix();
  return subset_years_impl(panel, first, count, &radix);
}

ClrPanel subset_years(const ClrPanel& panel, Index first, Index count) {
  return subset_years_impl(panel, first, count, nullptr);
}

}  // namespace dfp
