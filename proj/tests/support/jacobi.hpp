#pragma once

// Brute-force cyclic Jacobi eigensolver for small symmetric matrices.
// Kept free of Eigen's decomposition machinery so it can serve as an
// independent oracle for the production SelfAdjointEigenSolver path.

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace dfp::testing {

struct JacobiEig {
  Eigen::VectorXd values;   // descending
  Eigen::MatrixXd vectors;  // columns match values
};

inline JacobiEig jacobi_eig(const Eigen::MatrixXd& A, double tol = 1e-14, int max_sweeps = 100) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n) throw std::invalid_argument("jacobi_eig: matrix must be square");
  Eigen::MatrixXd S = 0.5 * (A + A.transpose());
  Eigen::MatrixXd V = Eigen::MatrixXd::Identity(n, n);

  const double scale = S.norm();
  const double stop = tol * (scale > 0 ? scale : 1.0);

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j) off += S(i, j) * S(i, j);
    if (std::sqrt(off) <= stop) break;

    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = S(p, q);
        if (std::abs(apq) <= stop / (double(n) * double(n))) continue;
        const double app = S(p, p), aqq = S(q, q);
        const double theta = (aqq - app) / (2.0 * apq);
        // smaller-angle root keeps the rotation stable
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double skp = S(k, p), skq = S(k, q);
          S(k, p) = c * skp - s * skq;
          S(k, q) = s * skp + c * skq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double spk = S(p, k), sqk = S(q, k);
          S(p, k) = c * spk - s * sqk;
          S(q, k) = s * spk + c * sqk;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = V(k, p), vkq = V(k, q);
          V(k, p) = c * vkp - s * vkq;
          V(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) order[static_cast<size_t>(i)] = i;
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index b) { return S(a, a) > S(b, b); });

  JacobiEig out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values(i) = S(order[static_cast<size_t>(i)], order[static_cast<size_t>(i)]);
    out.vectors.col(i) = V.col(order[static_cast<size_t>(i)]);
  }
  return out;
}

}  // namespace dfp::testing
