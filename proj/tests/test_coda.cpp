#include <random>

#include "dfp/coda.hpp"
#include "doctest.h"
#include "support/synthetic.hpp"

using namespace dfp;

TEST_CASE("clr hand case on a 3-point grid") {
  const AgeGrid grid = AgeGrid::regular(0.0, 2.0, 3);
  VectorXd v(3);
  v << std::exp(2.0), 1.0, std::exp(2.0);
  const ClrCurve y = clr({grid, 5.0 * v, 1e5});  // positive rescaling is irrelevant
  CHECK(y.values(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(y.values(1) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(y.values(2) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("clr of a uniform density is zero and always integrates to zero") {
  const AgeGrid grid = default_age_grid();
  const ClrCurve flat = clr({grid, VectorXd::Constant(grid.size(), 3.14), 1e5});
  CHECK(flat.values.cwiseAbs().maxCoeff() <= 1e-12);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ud(0.01, 5.0);
  for (int rep = 0; rep < 20; ++rep) {
    VectorXd d(grid.size());
    for (Index i = 0; i < d.size(); ++i) d(i) = ud(rng);
    const ClrCurve y = clr({grid, d, 1e5});
    CHECK(std::abs(grid.integrate(y.values)) <= 1e-8);
  }
}

TEST_CASE("clr rejects nonpositive values") {
  const AgeGrid grid = AgeGrid::regular(0.0, 2.0, 3);
  VectorXd v(3);
  v << 1.0, 0.0, 1.0;
  CHECK_THROWS_WITH_AS(clr({grid, v, 1e5}), doctest::Contains("repair"), std::domain_error);
}

TEST_CASE("inv_clr contract: positivity, radix mass, shift invariance, overflow guard") {
  const AgeGrid grid = default_age_grid();
  const Index p = grid.size();

  const DensityCurve uni = inv_clr({grid, VectorXd::Zero(p)}, 1e5);
  CHECK(uni.values.maxCoeff() == doctest::Approx(uni.values.minCoeff()));
  CHECK(grid.integrate(uni.values) == doctest::Approx(1e5).epsilon(1e-10));

  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd(0.0, 2.0);
  VectorXd y(p);
  for (Index i = 0; i < p; ++i) y(i) = nd(rng);

  const DensityCurve a = inv_clr({grid, y}, 1e5);
  const DensityCurve b = inv_clr({grid, (y.array() + 123.456).matrix()}, 1e5);
  CHECK((a.values - b.values).cwiseAbs().maxCoeff() <= 1e-8 * a.values.maxCoeff());
  CHECK(a.values.minCoeff() > 0.0);
  CHECK(grid.integrate(a.values) == doctest::Approx(1e5).epsilon(1e-10));

  // entries near +-800 would overflow exp without the max shift
  VectorXd big(p);
  for (Index i = 0; i < p; ++i) big(i) = 800.0 * std::sin(0.21 * double(i));
  const DensityCurve c = inv_clr({grid, big}, 1e5);
  CHECK(c.values.allFinite());
  CHECK(grid.integrate(c.values) == doctest::Approx(1e5).epsilon(1e-10));

  VectorXd nan = VectorXd::Zero(p);
  nan(0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(inv_clr({grid, nan}, 1e5), std::domain_error);
}

TEST_CASE("round trips hold both ways") {
  const AgeGrid grid = default_age_grid();
  const Index p = grid.size();
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> ud(0.0, 1.0);

  for (int rep = 0; rep < 50; ++rep) {
    // lognormal-ish density with occasional near-zero tails
    VectorXd d(p);
    for (Index i = 0; i < p; ++i) d(i) = std::exp(-8.0 * ud(rng)) + 1e-9 * ud(rng);
    d *= 1e5 / grid.integrate(d);
    const DensityCurve back = inv_clr(clr({grid, d, 1e5}), 1e5);
    CHECK((back.values - d).cwiseAbs().maxCoeff() <= 1e-8 * d.cwiseAbs().maxCoeff());
  }

  // clr(inv_clr(y)) = y for zero-integral y
  std::normal_distribution<double> nd(0.0, 1.0);
  VectorXd y(p);
  for (Index i = 0; i < p; ++i) y(i) = nd(rng);
  y.array() -= grid.integrate(y) / grid.span();
  const ClrCurve back = clr(inv_clr({grid, y}, 1e5));
  CHECK((back.values - y).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("clr_panel maps every block") {
  using dfp::testing::SyntheticSpec;
  SyntheticSpec spec;
  spec.n_states = 2;
  spec.n_years = 6;
  spec.n_ages = 21;
  const auto syn = dfp::testing::make_synthetic(spec);
  const ClrPanel cp = clr_panel(syn.densities);
  REQUIRE(cp.n_states() == 2);
  REQUIRE(cp.n_years() == 6);
  for (Index s = 0; s < cp.n_states(); ++s)
    for (Gender g : kGenders)
      CHECK((cp.block(s, g) - syn.clr.block(s, g)).cwiseAbs().maxCoeff() <= 1e-8);
}
