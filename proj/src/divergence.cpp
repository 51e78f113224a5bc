#include "dfp/divergence.hpp"

#include <stdexcept>

namespace dfp {
namespace {

VectorXd to_probs(const DensityCurve& c, const char* who) {
  if (!(c.values.minCoeff() > 0.0))
    throw std::domain_error(std::string(who) + ": densities must be strictly positive");
  return c.values / c.values.sum();
}

void check_pair(const DensityCurve& d, const DensityCurve& dhat, const char* who) {
  if (d.grid != dhat.grid)
    throw std::invalid_argument(std::string(who) + ": curves live on different grids");
}

}  // namespace

double kld(const DensityCurve& d, const DensityCurve& dhat) {
  check_pair(d, dhat, "kld");
  const VectorXd p = to_probs(d, "kld");
  const VectorXd q = to_probs(dhat, "kld");
  const VectorXd lr = (p.array().log() - q.array().log()).matrix();
  return p.dot(lr) - q.dot(lr);
}

double jsd(const DensityCurve& d, const DensityCurve& dhat) {
  check_pair(d, dhat, "jsd");
  const VectorXd p = to_probs(d, "jsd");
  const VectorXd q = to_probs(dhat, "jsd");
  // Geometric-mean midpoint: log delta is the average of the two logs, so
  // each half-divergence is half the one-sided Kullback-Leibler term.
  const VectorXd logp = p.array().log();
  const VectorXd logq = q.array().log();
  const VectorXd logm = 0.5 * (logp + logq);
  return 0.5 * p.dot(logp - logm) + 0.5 * q.dot(logq - logm);
}

}  // namespace dfp
