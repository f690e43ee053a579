#include "zobeam/channel.hpp"

#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>

namespace zobeam {

namespace {

constexpr double kPi = 3.14159265358979323846;

void append_if(std::vector<std::string>& out, bool violated,
               const std::string& message) {
  if (violated) out.push_back(message);
}

// Unit-modulus steering vector of an N-element uniform linear array at half
// wavelength spacing: a_n = exp(j * pi * n * sin(angle)).
Eigen::VectorXcd steering(int n, double angle) {
  Eigen::VectorXcd a(n);
  const double step = kPi * std::sin(angle);
  for (int i = 0; i < n; ++i) a(i) = std::polar(1.0, step * i);
  return a;
}

}  // namespace

std::vector<std::string> scenario_violations(const Scenario& s) {
  std::vector<std::string> v;
  append_if(v, s.tx_antennas < 1, "tx_antennas: must be >= 1");
  append_if(v, s.users < 1, "users: must be >= 1");
  append_if(v, s.irs_elements < 1, "irs_elements: must be >= 1");
  append_if(v, !(s.power_budget_watts > 0.0),
            "power_budget_watts: must be > 0");
  if (s.users >= 1) {
    if (s.noise_var_watts.size() != s.users) {
      std::ostringstream msg;
      msg << "noise_var_watts: expected " << s.users << " entries, got "
          << s.noise_var_watts.size();
      v.push_back(msg.str());
    } else {
      for (int k = 0; k < s.users; ++k) {
        if (!(s.noise_var_watts(k) > 0.0)) {
          std::ostringstream msg;
          msg << "noise_var_watts[" << k << "]: must be > 0, got "
              << s.noise_var_watts(k);
          v.push_back(msg.str());
        }
      }
    }
    if (s.weights.size() != s.users) {
      std::ostringstream msg;
      msg << "weights: expected " << s.users << " entries, got "
          << s.weights.size();
      v.push_back(msg.str());
    } else {
      for (int k = 0; k < s.users; ++k) {
        if (!(s.weights(k) >= 0.0) || !std::isfinite(s.weights(k))) {
          std::ostringstream msg;
          msg << "weights[" << k << "]: must be finite and >= 0, got "
              << s.weights(k);
          v.push_back(msg.str());
        }
      }
    }
  }
  append_if(v, !(s.rician_direct >= 0.0) || !std::isfinite(s.rician_direct),
            "rician_direct: must be finite and >= 0");
  append_if(v, !(s.rician_tx_irs >= 0.0) || !std::isfinite(s.rician_tx_irs),
            "rician_tx_irs: must be finite and >= 0");
  append_if(v,
            !(s.rician_irs_user >= 0.0) || !std::isfinite(s.rician_irs_user),
            "rician_irs_user: must be finite and >= 0");
  append_if(v, !(s.gain_direct >= 0.0) || !std::isfinite(s.gain_direct),
            "gain_direct: must be finite and >= 0");
  append_if(v, !(s.gain_tx_irs > 0.0) || !std::isfinite(s.gain_tx_irs),
            "gain_tx_irs: must be finite and > 0");
  append_if(v, !(s.gain_irs_user > 0.0) || !std::isfinite(s.gain_irs_user),
            "gain_irs_user: must be finite and > 0");
  append_if(v, !(s.irs_correlation >= 0.0 && s.irs_correlation < 1.0),
            "irs_correlation: must lie in [0, 1)");
  return v;
}

void require_valid(const Scenario& scenario) {
  const std::vector<std::string> v = scenario_violations(scenario);
  if (v.empty()) return;
  std::ostringstream msg;
  msg << "invalid scenario (" << v.size() << " violation"
      << (v.size() == 1 ? "" : "s") << "):";
  for (const std::string& item : v) msg << "\n  - " << item;
  throw std::invalid_argument(msg.str());
}

ChannelModel::ChannelModel(const Scenario& scenario) : scenario_(scenario) {
  require_valid(scenario_);
  const int m = scenario_.tx_antennas;
  const int k = scenario_.users;
  const int s = scenario_.irs_elements;

  Rng geo(derive_seed(scenario_.geometry_seed, 0x6e0, 0));
  const double tx_angle = geo.uniform(-kPi / 2, kPi / 2);
  const double irs_angle = geo.uniform(-kPi / 2, kPi / 2);
  los_G_ = steering(s, irs_angle) * steering(m, tx_angle).adjoint();

  los_h_r_.resize(s, k);
  los_h_d_.resize(m, k);
  for (int user = 0; user < k; ++user) {
    los_h_r_.col(user) = steering(s, geo.uniform(-kPi / 2, kPi / 2));
    los_h_d_.col(user) = steering(m, geo.uniform(-kPi / 2, kPi / 2));
  }
}

namespace {

// Fills one column with the Rician mixture. The scattered part is drawn
// sequentially; when rho > 0 an AR(1) recursion couples consecutive entries
// while preserving the stationary CN(0,1) marginal.
void fill_column(Eigen::Ref<Eigen::VectorXcd> out,
                 const Eigen::Ref<const Eigen::VectorXcd>& los, double gain,
                 double kappa, double rho, Rng& rng) {
  const double los_w = std::sqrt(gain * kappa / (1.0 + kappa));
  const double scat_w = std::sqrt(gain / (1.0 + kappa));
  const double fresh_w = std::sqrt(1.0 - rho * rho);
  std::complex<double> prev(0.0, 0.0);
  for (int i = 0; i < out.size(); ++i) {
    std::complex<double> z = rng.complex_normal();
    if (rho > 0.0) {
      z = (i == 0) ? z : rho * prev + fresh_w * z;
      prev = z;
    }
    out(i) = los_w * los(i) + scat_w * z;
  }
}

}  // namespace

ChannelRealization ChannelModel::sample(Rng& rng) const {
  const Scenario& sc = scenario_;
  ChannelRealization r;
  r.G.resize(sc.irs_elements, sc.tx_antennas);
  r.h_r.resize(sc.irs_elements, sc.users);
  r.h_d.resize(sc.tx_antennas, sc.users);

  for (int m = 0; m < sc.tx_antennas; ++m) {
    fill_column(r.G.col(m), los_G_.col(m), sc.gain_tx_irs, sc.rician_tx_irs,
                sc.irs_correlation, rng);
  }
  for (int k = 0; k < sc.users; ++k) {
    fill_column(r.h_r.col(k), los_h_r_.col(k), sc.gain_irs_user,
                sc.rician_irs_user, sc.irs_correlation, rng);
  }
  for (int k = 0; k < sc.users; ++k) {
    // The direct link has no surface dimension, so correlation never applies.
    fill_column(r.h_d.col(k), los_h_d_.col(k), sc.gain_direct,
                sc.rician_direct, 0.0, rng);
  }
  return r;
}

Eigen::VectorXcd effective_channel(const ChannelRealization& realization,
                                   const Eigen::VectorXcd& reflection) {
  const int s = static_cast<int>(realization.G.rows());
  const int m = static_cast<int>(realization.G.cols());
  const int k = static_cast<int>(realization.h_r.cols());
  if (realization.h_r.rows() != s || realization.h_d.rows() != m ||
      realization.h_d.cols() != k || reflection.size() != s) {
    std::ostringstream msg;
    msg << "effective_channel: inconsistent sizes (G " << s << "x" << m
        << ", h_r " << realization.h_r.rows() << "x" << realization.h_r.cols()
        << ", h_d " << realization.h_d.rows() << "x"
        << realization.h_d.cols() << ", reflection " << reflection.size()
        << ")";
    throw std::invalid_argument(msg.str());
  }
  Eigen::VectorXcd h(m * k);
  for (int user = 0; user < k; ++user) {
    const Eigen::VectorXcd scaled =
        reflection.cwiseProduct(realization.h_r.col(user));
    h.segment(user * m, m) =
        realization.G.adjoint() * scaled + realization.h_d.col(user);
  }
  return h;
}

std::pair<Eigen::VectorXcd, Eigen::VectorXcd> probe_pair(
    const ChannelRealization& realization, const IrsMap& map,
    const Eigen::VectorXd& theta, const Eigen::VectorXd& u, double mu) {
  if (u.size() != theta.size()) {
    throw std::invalid_argument("probe_pair: theta and u differ in length");
  }
  if (!(mu >= 0.0) || !std::isfinite(mu)) {
    throw std::invalid_argument("probe_pair: mu must be finite and >= 0");
  }
  Eigen::VectorXcd plus =
      effective_channel(realization, map.reflection(theta + mu * u));
  Eigen::VectorXcd minus =
      effective_channel(realization, map.reflection(theta - mu * u));
  return {std::move(plus), std::move(minus)};
}

Eigen::MatrixXcd effective_channel_jacobian(
    const ChannelRealization& realization, const IrsMap& map,
    const Eigen::VectorXd& theta) {
  const int m = static_cast<int>(realization.G.cols());
  const int k = static_cast<int>(realization.h_r.cols());
  const ReflectionJacobian jac = map.reflection_jacobian(theta);
  Eigen::MatrixXcd out =
      Eigen::MatrixXcd::Zero(m * k, static_cast<int>(theta.size()));
  // theta component s perturbs one reflection element e: the response of
  // user u is d r_e * h_r(e, u) * conj(G(e, :))^T.
  for (int s = 0; s < theta.size(); ++s) {
    const int e = jac.element[s];
    const Eigen::VectorXcd tx_side = realization.G.row(e).adjoint();
    for (int user = 0; user < k; ++user) {
      out.block(user * m, s, m, 1) =
          jac.deriv(s) * realization.h_r(e, user) * tx_side;
    }
  }
  return out;
}

}  // namespace zobeam
