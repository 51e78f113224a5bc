#include <random>

#include "dfp/divergence.hpp"
#include "doctest.h"

using namespace dfp;

namespace {

DensityCurve curve(const AgeGrid& grid, std::initializer_list<double> vals, double radix = 1e5) {
  VectorXd v(static_cast<Index>(vals.size()));
  Index i = 0;
  for (double x : vals) v(i++) = x;
  return {grid, v, radix};
}

}  // namespace

TEST_CASE("kld hand case (0.5, 0.5) vs (0.25, 0.75)") {
  const AgeGrid grid = AgeGrid::regular(0.0, 1.0, 2);
  const DensityCurve p = curve(grid, {0.5, 0.5});
  const DensityCurve q = curve(grid, {0.25, 0.75});

  // direct summation oracle on probability vectors
  double want = 0.0;
  const double pv[2] = {0.5, 0.5}, qv[2] = {0.25, 0.75};
  for (int i = 0; i < 2; ++i)
    want += pv[i] * std::log(pv[i] / qv[i]) + qv[i] * std::log(qv[i] / pv[i]);
  CHECK(want == doctest::Approx(0.2746530722).epsilon(1e-9));

  CHECK(kld(p, q) == doctest::Approx(want).epsilon(1e-12));
  CHECK(jsd(p, q) == doctest::Approx(want / 4.0).epsilon(1e-12));
}

TEST_CASE("normalisation makes the radix irrelevant") {
  const AgeGrid grid = AgeGrid::regular(0.0, 3.0, 4);
  const DensityCurve p = curve(grid, {1.0, 2.0, 3.0, 4.0}, 1e5);
  const DensityCurve q = curve(grid, {4.0, 1.0, 2.0, 3.0}, 1e5);
  DensityCurve p2 = p;
  p2.values *= 37.0;
  p2.radix = 1.0;
  CHECK(kld(p2, q) == doctest::Approx(kld(p, q)).epsilon(1e-12));
  CHECK(jsd(p2, q) == doctest::Approx(jsd(p, q)).epsilon(1e-12));
}

TEST_CASE("divergence axioms and the quarter identity on random pairs") {
  const AgeGrid grid = default_age_grid();
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ud(1e-6, 1.0);

  for (int rep = 0; rep < 200; ++rep) {
    VectorXd a(grid.size()), b(grid.size());
    for (Index i = 0; i < grid.size(); ++i) {
      a(i) = ud(rng);
      b(i) = ud(rng);
    }
    const DensityCurve p{grid, a, 1e5};
    const DensityCurve q{grid, b, 1e5};

    const double k1 = kld(p, q), k2 = kld(q, p);
    const double j1 = jsd(p, q), j2 = jsd(q, p);
    CHECK(k1 >= 0.0);
    CHECK(j1 >= 0.0);
    CHECK(k1 == k2);  // symmetric by construction, bitwise
    CHECK(j1 == doctest::Approx(j2).epsilon(1e-14));
    CHECK(std::abs(j1 - k1 / 4.0) <= 1e-12 * std::max(1.0, k1));

    CHECK(kld(p, p) == 0.0);
    CHECK(jsd(p, p) == 0.0);
  }
}

TEST_CASE("zero iff equal") {
  const AgeGrid grid = AgeGrid::regular(0.0, 2.0, 3);
  const DensityCurve p = curve(grid, {1.0, 2.0, 1.0});
  DensityCurve q = p;
  q.values(1) += 1e-6;
  CHECK(kld(p, q) > 0.0);
  CHECK(jsd(p, q) > 0.0);
}

TEST_CASE("error paths") {
  const AgeGrid g3 = AgeGrid::regular(0.0, 2.0, 3);
  const AgeGrid g4 = AgeGrid::regular(0.0, 2.0, 4);
  const DensityCurve p = curve(g3, {1.0, 2.0, 1.0});
  const DensityCurve q4 = curve(g4, {1.0, 2.0, 1.0, 1.0});
  CHECK_THROWS_AS(kld(p, q4), std::invalid_argument);
  CHECK_THROWS_AS(jsd(p, q4), std::invalid_argument);

  const DensityCurve zero = curve(g3, {1.0, 0.0, 1.0});
  CHECK_THROWS_AS(kld(p, zero), std::domain_error);
  CHECK_THROWS_AS(jsd(zero, p), std::domain_error);
}
