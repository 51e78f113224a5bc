#include <random>

#include "dfp/longrun.hpp"
#include "doctest.h"

using namespace dfp;

namespace {

MatrixXd random_series(Index T, Index p, unsigned long long seed, double sd = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, sd);
  MatrixXd s(T, p);
  for (Index t = 0; t < T; ++t)
    for (Index j = 0; j < p; ++j) s(t, j) = nd(rng);
  return s;
}

// Direct transcription of the lag-l autocovariance formula, kept loop-level
// so it cannot share a bug with the production matrix code.
MatrixXd autocov_oracle(const MatrixXd& x, int lag) {
  const Index T = x.rows(), p = x.cols();
  const RowVectorXd mean = x.colwise().mean();
  MatrixXd g = MatrixXd::Zero(p, p);
  for (Index t = 0; t + lag < T; ++t)
    g += (x.row(t) - mean).transpose() * (x.row(t + lag) - mean);
  return g / static_cast<double>(T);
}

}  // namespace

TEST_CASE("lag weights") {
  CHECK(lag_weight(LagKernel::Bartlett, 0.0) == doctest::Approx(1.0));
  CHECK(lag_weight(LagKernel::Bartlett, 0.5) == doctest::Approx(0.5));
  CHECK(lag_weight(LagKernel::Bartlett, 1.0) == doctest::Approx(0.0));
  CHECK(lag_weight(LagKernel::Bartlett, 1.5) == doctest::Approx(0.0));
  CHECK(lag_weight(LagKernel::FlatTop, 0.25) == doctest::Approx(1.0));
  CHECK(lag_weight(LagKernel::FlatTop, 0.5) == doctest::Approx(1.0));
  CHECK(lag_weight(LagKernel::FlatTop, 0.75) == doctest::Approx(0.5));
  CHECK(lag_weight(LagKernel::FlatTop, 1.0) == doctest::Approx(0.0));
}

TEST_CASE("autocov hand case on the series (1, -1)") {
  MatrixXd s(2, 1);
  s << 1.0, -1.0;
  CHECK(autocov_matrix(s, 0)(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(autocov_matrix(s, 1)(0, 0) == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(autocov_matrix(s, -1)(0, 0) == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK_THROWS_AS(autocov_matrix(s, 2), std::invalid_argument);
  CHECK_THROWS_AS(autocov_matrix(s, -2), std::invalid_argument);
}

TEST_CASE("autocov matches a loop-level oracle and its symmetries") {
  const MatrixXd s = random_series(30, 4, 5);
  for (int lag : {0, 1, 2, 5}) {
    const MatrixXd got = autocov_matrix(s, lag);
    CHECK((got - autocov_oracle(s, lag)).cwiseAbs().maxCoeff() <= 1e-12);
    // negative lag transposes
    CHECK((autocov_matrix(s, -lag) - got.transpose()).cwiseAbs().maxCoeff() == 0.0);
  }
  const MatrixXd g0 = autocov_matrix(s, 0);
  CHECK((g0 - g0.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(g0);
  CHECK(es.eigenvalues().minCoeff() >= -1e-10 * g0.trace());
}

TEST_CASE("longrun hand cases") {
  MatrixXd s(2, 1);
  s << 1.0, -1.0;
  // Bartlett b = 1 zeroes every lag beyond 0
  CHECK(longrun_cov_matrix(s, LagKernel::Bartlett, 1.0)(0, 0) ==
        doctest::Approx(1.0).epsilon(1e-12));
  // b = 2: 1 + 2 * (1/2) * (-0.5)
  CHECK(longrun_cov_matrix(s, LagKernel::Bartlett, 2.0)(0, 0) ==
        doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("longrun equals the direct kernel-weighted sum") {
  const MatrixXd s = random_series(25, 3, 17);
  for (LagKernel k : {LagKernel::Bartlett, LagKernel::FlatTop}) {
    for (double b : {1.0, 2.5, 6.0}) {
      MatrixXd want = autocov_oracle(s, 0);
      for (int l = 1; l < 25; ++l) {
        const double w = lag_weight(k, l / b);
        if (w <= 0.0) break;
        const MatrixXd g = autocov_oracle(s, l);
        want += w * (g + g.transpose());
      }
      const MatrixXd got = longrun_cov_matrix(s, k, b);
      CHECK((got - want).cwiseAbs().maxCoeff() <= 1e-10);
      CHECK((got - got.transpose()).cwiseAbs().maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("longrun precondition errors") {
  MatrixXd one(1, 1);
  one << 1.0;
  CHECK_THROWS_AS(longrun_cov_matrix(one, LagKernel::Bartlett, 1.0), std::invalid_argument);
  MatrixXd two(2, 1);
  two << 1.0, -1.0;
  CHECK_THROWS_AS(longrun_cov_matrix(two), std::invalid_argument);  // plug-in needs T >= 4
  CHECK_THROWS_AS(longrun_cov_matrix(two, LagKernel::Bartlett, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(longrun_cov_matrix(two, LagKernel::Bartlett, -1.0), std::invalid_argument);
}

TEST_CASE("plugin bandwidth lands in [1, T/4] and is echoed") {
  const MatrixXd s = random_series(80, 3, 21);
  const double b = plugin_bandwidth(s);
  CHECK(b >= 1.0);
  CHECK(b <= 20.0);
  double echoed = 0.0;
  (void)longrun_cov_matrix(s, LagKernel::Bartlett, std::nullopt, &echoed);
  CHECK(echoed == b);
  double fixed = 0.0;
  (void)longrun_cov_matrix(s, LagKernel::Bartlett, 3.25, &fixed);
  CHECK(fixed == 3.25);
}

TEST_CASE("plugin long-run covariance of iid noise stays near gamma_0") {
  double rel_sum = 0.0;
  const int seeds = 100;
  for (int seed = 0; seed < seeds; ++seed) {
    const MatrixXd s = random_series(500, 4, 1000 + static_cast<unsigned long long>(seed));
    const MatrixXd lrc = longrun_cov_matrix(s);
    const MatrixXd g0 = autocov_matrix(s, 0);
    rel_sum += (lrc - g0).norm() / g0.norm();
  }
  CHECK(rel_sum / seeds <= 0.15);
}

TEST_CASE("grid wrappers validate widths and mark stacking") {
  const AgeGrid grid = AgeGrid::regular(0.0, 4.0, 5);
  const MatrixXd s = random_series(12, 10, 3);
  const CovSurface cs = longrun_cov(grid, s, LagKernel::Bartlett, 2.0, 2);
  CHECK(cs.stack == 2);
  CHECK(cs.values.rows() == 10);
  CHECK(cs.grid == grid);

  const CovSurface a = autocov(grid, random_series(12, 5, 4), 0, 1);
  CHECK(a.stack == 1);
  CHECK(a.values.rows() == 5);

  CHECK_THROWS_AS(longrun_cov(grid, s, LagKernel::Bartlett, 2.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(autocov(grid, s, 0, 3), std::invalid_argument);
}
