#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "dfp/grid.hpp"

namespace dfp {

enum class Gender : int { Female = 0, Male = 1 };

inline constexpr Gender kGenders[2] = {Gender::Female, Gender::Male};

char gender_code(Gender g);
Gender gender_from_code(char c);

struct PanelKey {
  std::string state;
  Gender gender = Gender::Female;
  int year = 0;
};

/// Age-at-death distribution on a grid; integrates to `radix` under
/// the grid quadrature once normalised.
struct DensityCurve {
  AgeGrid grid;
  VectorXd values;
  double radix = 1e5;
};

/// Centred log-ratio image of a density; integrates to zero.
struct ClrCurve {
  AgeGrid grid;
  VectorXd values;
};

/// Rectangular state x gender x year collection of curves sharing one grid.
/// Block (s, g) is a T x p matrix whose row t holds the curve for years()[t].
class CurvePanel {
 public:
  CurvePanel() = default;
  CurvePanel(AgeGrid grid, std::vector<std::string> states, std::vector<int> years);

  Index n_states() const { return static_cast<Index>(states_.size()); }
  Index n_years() const { return static_cast<Index>(years_.size()); }
  Index n_ages() const { return grid_.size(); }

  const AgeGrid& grid() const { return grid_; }
  const std::vector<std::string>& states() const { return states_; }
  const std::vector<int>& years() const { return years_; }

  MatrixXd& block(Index s, Gender g) { return blocks_[2 * s + static_cast<int>(g)]; }
  const MatrixXd& block(Index s, Gender g) const { return blocks_[2 * s + static_cast<int>(g)]; }

  /// Index of a state name, or -1 when absent.
  Index state_index(std::string_view name) const;

 private:
  AgeGrid grid_;
  std::vector<std::string> states_;
  std::vector<int> years_;
  std::vector<MatrixXd> blocks_;
};

class ClrPanel : public CurvePanel {
 public:
  using CurvePanel::CurvePanel;
  ClrCurve curve(Index s, Gender g, Index t) const;
};

class DensityPanel : public CurvePanel {
 public:
  DensityPanel() = default;
  DensityPanel(AgeGrid grid, std::vector<std::string> states, std::vector<int> years,
               double radix = 1e5);
  double radix() const { return radix_; }
  DensityCurve curve(Index s, Gender g, Index t) const;

 private:
  double radix_ = 1e5;
};

/// Panel restricted to years [first, first + count).
DensityPanel subset_years(const DensityPanel& panel, Index first, Index count);
ClrPanel subset_years(const ClrPanel& panel, Index first, Index count);

}  // namespace dfp
