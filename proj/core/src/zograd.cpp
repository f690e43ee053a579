#include "zobeam/zograd.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace zobeam {

Eigen::VectorXd sample_direction(int dim, Rng& rng) {
  if (dim < 1) {
    throw std::invalid_argument("sample_direction: dimension must be >= 1");
  }
  Eigen::VectorXd u(dim);
  for (int i = 0; i < dim; ++i) u(i) = rng.normal();
  return u;
}

Eigen::VectorXd sample_gradient(const Eigen::VectorXcd& delta,
                                const Eigen::VectorXd& u, double mu,
                                const Eigen::VectorXcd& cogradient) {
  if (!(mu > 0.0) || !std::isfinite(mu)) {
    std::ostringstream msg;
    msg << "sample_gradient: mu must be finite and > 0, got " << mu;
    throw std::invalid_argument(msg.str());
  }
  if (delta.size() != cogradient.size()) {
    std::ostringstream msg;
    msg << "sample_gradient: probe difference (" << delta.size()
        << ") and cogradient (" << cogradient.size() << ") differ in length";
    throw std::invalid_argument(msg.str());
  }
  if (u.size() == 0) {
    throw std::invalid_argument("sample_gradient: empty direction");
  }
  // Re(Delta)^T Re(g) + Im(Delta)^T Re(j g) collapses to Re(Delta^T g).
  const double contraction = (delta.transpose() * cogradient).value().real();
  return (contraction / mu) * u;
}

}  // namespace zobeam
