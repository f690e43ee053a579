// Rician fading downlink channel with a reflecting surface in the loop.
//
// An M-antenna transmitter serves K single-antenna users, aided by an
// S-element surface. One realization holds the three link groups
//   G       (S x M): transmitter -> surface,
//   h_r     (S x K): surface -> user, one column per user,
//   h_d     (M x K): transmitter -> user (direct), one column per user.
// Under per-element reflection coefficients r the effective channel of user
// k is h_k = G^H Diag(r) h_r(:,k) + h_d(:,k). Effective channels stack
// user-major into a length M*K vector: user k occupies rows [k*M, (k+1)*M).
//
// Each link entry is sqrt(gain) * (sqrt(kappa/(1+kappa)) * los +
// sqrt(1/(1+kappa)) * CN(0,1)). Line-of-sight factors are unit-modulus
// steering products drawn once from the scenario's geometry seed, so they
// are fixed across realizations of one scenario. The optional exponential
// correlation factor couples the scattered component across neighbouring
// surface elements via a stationary AR(1) recursion.
#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "zobeam/irs.hpp"
#include "zobeam/rng.hpp"

namespace zobeam {

struct Scenario {
  int tx_antennas = 0;   // M
  int users = 0;         // K
  int irs_elements = 0;  // S

  double power_budget_watts = 1.0;
  Eigen::VectorXd noise_var_watts;  // length K
  Eigen::VectorXd weights;          // length K, nonnegative

  // Rician K-factors (linear scale) per link group.
  double rician_direct = 1.0;
  double rician_tx_irs = 10.0;
  double rician_irs_user = 3.0;

  // Mean path gains (linear scale) per link group.
  double gain_direct = 1.0;
  double gain_tx_irs = 1.0;
  double gain_irs_user = 1.0;

  std::uint64_t geometry_seed = 1;
  double irs_correlation = 0.0;  // AR(1) factor in [0, 1), 0 = independent

  int effective_dim() const { return tx_antennas * users; }
};

// Returns every constraint violated by the scenario, one message per field.
std::vector<std::string> scenario_violations(const Scenario& scenario);

// Throws std::invalid_argument listing all violations at once.
void require_valid(const Scenario& scenario);

struct ChannelRealization {
  Eigen::MatrixXcd G;    // S x M
  Eigen::MatrixXcd h_r;  // S x K
  Eigen::MatrixXcd h_d;  // M x K
};

// Holds the deterministic line-of-sight geometry of a scenario and draws
// fading realizations around it. Draw order per realization is fixed (G by
// column, then h_r by user, then h_d by user), so a seeded generator yields
// bit-identical realizations on every platform.
class ChannelModel {
 public:
  explicit ChannelModel(const Scenario& scenario);

  ChannelRealization sample(Rng& rng) const;

  const Scenario& scenario() const { return scenario_; }
  const Eigen::MatrixXcd& los_G() const { return los_G_; }
  const Eigen::MatrixXcd& los_h_r() const { return los_h_r_; }
  const Eigen::MatrixXcd& los_h_d() const { return los_h_d_; }

 private:
  Scenario scenario_;
  Eigen::MatrixXcd los_G_;
  Eigen::MatrixXcd los_h_r_;
  Eigen::MatrixXcd los_h_d_;
};

// Composes the effective channel of every user under the given reflection,
// stacked user-major. Throws std::invalid_argument on size mismatch.
Eigen::VectorXcd effective_channel(const ChannelRealization& realization,
                                   const Eigen::VectorXcd& reflection);

// Two-sided smoothing probe: the effective channels at theta + mu*u and
// theta - mu*u through the surface map, for the same realization. Probe
// points are evaluated as-is (they may sit slightly outside the feasible
// box; the reflection maps accept that by design). Costs exactly two
// effective-channel compositions.
std::pair<Eigen::VectorXcd, Eigen::VectorXcd> probe_pair(
    const ChannelRealization& realization, const IrsMap& map,
    const Eigen::VectorXd& theta, const Eigen::VectorXd& u, double mu);

// Analytic jacobian d(effective channel)/d(theta) of the composition for a
// fixed realization, size (M*K) x dim(theta). Used by gradient diagnostics
// and the smoothness checks; the optimizer itself never differentiates the
// channel.
Eigen::MatrixXcd effective_channel_jacobian(
    const ChannelRealization& realization, const IrsMap& map,
    const Eigen::VectorXd& theta);

}  // namespace zobeam
