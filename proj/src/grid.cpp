#include "dfp/grid.hpp"

#include <stdexcept>

namespace dfp {

AgeGrid::AgeGrid(VectorXd ages) : ages_(std::move(ages)) {
  const Index p = ages_.size();
  if (p < 2) throw std::invalid_argument("AgeGrid: need at least two grid points");
  for (Index i = 1; i < p; ++i) {
    if (!(ages_(i) > ages_(i - 1)))
      throw std::invalid_argument("AgeGrid: ages must be strictly increasing");
  }
  weights_.resize(p);
  weights_(0) = 0.5 * (ages_(1) - ages_(0));
  for (Index i = 1; i + 1 < p; ++i) weights_(i) = 0.5 * (ages_(i + 1) - ages_(i - 1));
  weights_(p - 1) = 0.5 * (ages_(p - 1) - ages_(p - 2));
}

AgeGrid AgeGrid::regular(double first, double last, Index n) {
  if (n < 2) throw std::invalid_argument("AgeGrid: need at least two grid points");
  return AgeGrid(VectorXd::LinSpaced(n, first, last));
}

AgeGrid default_age_grid() { return AgeGrid::regular(0.0, 110.0, 111); }

}  // namespace dfp
