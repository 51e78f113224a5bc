#pragma once

#include <Eigen/Dense>
#include <cmath>

namespace dfp {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::RowVectorXd;
using Eigen::VectorXd;

/// Strictly increasing age grid together with composite trapezoid
/// quadrature weights.  The weights sum exactly to the grid span.
class AgeGrid {
 public:
  AgeGrid() = default;
  explicit AgeGrid(VectorXd ages);

  /// Evenly spaced grid covering [first, last] with n points.
  static AgeGrid regular(double first, double last, Index n);

  Index size() const { return ages_.size(); }
  const VectorXd& ages() const { return ages_; }
  const VectorXd& weights() const { return weights_; }

  double span() const { return ages_(ages_.size() - 1) - ages_(0); }

  /// Trapezoid quadrature of a function sampled on the grid.
  double integrate(const Eigen::Ref<const VectorXd>& f) const { return weights_.dot(f); }

  double inner(const Eigen::Ref<const VectorXd>& f, const Eigen::Ref<const VectorXd>& g) const {
    return (f.array() * g.array() * weights_.array()).sum();
  }

  double norm(const Eigen::Ref<const VectorXd>& f) const { return std::sqrt(inner(f, f)); }

  bool operator==(const AgeGrid& o) const {
    return ages_.size() == o.ages_.size() && (ages_.array() == o.ages_.array()).all();
  }
  bool operator!=(const AgeGrid& o) const { return !(*this == o); }

 private:
  VectorXd ages_;
  VectorXd weights_;
};

/// Single-year-of-age grid 0, 1, ..., 110.
AgeGrid default_age_grid();

}  // namespace dfp
