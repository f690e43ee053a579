// Weighted sum-rate utility of the multiuser downlink and its Wirtinger
// cogradient in the effective channel.
//
// Effective channels H and precoders W stack user-major into length M*K
// vectors: user k owns rows [k*M, (k+1)*M). With a_{k,j} = h_k^H w_j,
//   sinr_k = |a_{k,k}|^2 / (sum_{j!=k} |a_{k,j}|^2 + noise_k),
//   F(W, H) = sum_k weight_k * log2(1 + sinr_k).
//
// The cogradient treats conj(h_k) as constant while differentiating in h_k.
// Under that convention the real gradient of a composition theta -> H(theta)
// is exactly 2 * Re(J^T g) where J is the (complex) channel jacobian and g
// the cogradient; assemble_real_gradient implements that contraction. The
// same unconjugated pairing appears in the two-point gradient estimator, so
// estimator and diagnostics share one convention, enforced by the
// finite-difference tests.
#pragma once

#include <Eigen/Dense>

namespace zobeam {

// Signal-to-interference-plus-noise ratio of one user.
double sinr(const Eigen::VectorXcd& precoder,
            const Eigen::VectorXcd& effective_channel, int users, int user,
            double noise_var);

// Weighted sum rate in bits. weights and noise_var have one entry per user.
double sumrate(const Eigen::VectorXcd& precoder,
               const Eigen::VectorXcd& effective_channel,
               const Eigen::VectorXd& weights,
               const Eigen::VectorXd& noise_var);

// Wirtinger cogradient dF/dH, stacked user-major like its arguments.
Eigen::VectorXcd cogradient(const Eigen::VectorXcd& precoder,
                            const Eigen::VectorXcd& effective_channel,
                            const Eigen::VectorXd& weights,
                            const Eigen::VectorXd& noise_var);

// Real gradient of theta -> F(W, H(theta)) from the channel jacobian and the
// cogradient at H(theta): 2 * Re(J^T g).
Eigen::VectorXd assemble_real_gradient(const Eigen::MatrixXcd& jacobian,
                                       const Eigen::VectorXcd& cogradient);

}  // namespace zobeam
