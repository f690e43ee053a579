// Two-point Gaussian smoothing estimator of the surface-parameter gradient.
//
// With a probe pair H(theta +/- mu*u) for one realization, Delta their
// difference, and g the utility cogradient at the evaluation channel, the
// sample gradient is
//   d = (1/mu) * (Re(Delta)^T Re(g) + Im(Delta)^T Re(j*g)) * u
//     = (1/mu) * Re(Delta^T g) * u,
// an unconjugated pairing that matches the real-gradient assembly in
// utility.hpp. The estimator touches the channel only through the two probe
// evaluations, never through derivatives. It is exactly unbiased when the
// channel is affine in theta and biased O(mu) otherwise.
#pragma once

#include <Eigen/Dense>

#include "zobeam/rng.hpp"

namespace zobeam {

// Standard Gaussian probe direction u ~ N(0, I_dim).
Eigen::VectorXd sample_direction(int dim, Rng& rng);

// Single-sample gradient estimate from a probe difference. Throws
// std::invalid_argument for nonpositive mu or mismatched lengths.
Eigen::VectorXd sample_gradient(const Eigen::VectorXcd& delta,
                                const Eigen::VectorXd& u, double mu,
                                const Eigen::VectorXcd& cogradient);

}  // namespace zobeam
