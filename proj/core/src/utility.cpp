#include "zobeam/utility.hpp"

#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>

namespace zobeam {

namespace {

constexpr double kLn2 = 0.69314718055994530942;

void check_stacking(const Eigen::VectorXcd& precoder,
                    const Eigen::VectorXcd& channel, int users,
                    const char* who) {
  if (users < 1 || precoder.size() != channel.size() ||
      precoder.size() % users != 0 || precoder.size() == 0) {
    std::ostringstream msg;
    msg << who << ": precoder length " << precoder.size()
        << " and channel length " << channel.size()
        << " must be equal, nonzero, and divisible by " << users << " users";
    throw std::invalid_argument(msg.str());
  }
}

// a(k, j) = h_k^H w_j for all user pairs.
Eigen::MatrixXcd inner_products(const Eigen::VectorXcd& precoder,
                                const Eigen::VectorXcd& channel, int users) {
  const int m = static_cast<int>(precoder.size()) / users;
  Eigen::MatrixXcd a(users, users);
  for (int k = 0; k < users; ++k) {
    for (int j = 0; j < users; ++j) {
      a(k, j) = channel.segment(k * m, m).dot(precoder.segment(j * m, m));
    }
  }
  return a;
}

void check_per_user(const Eigen::VectorXd& weights,
                    const Eigen::VectorXd& noise_var, const char* who) {
  if (weights.size() != noise_var.size() || weights.size() == 0) {
    std::ostringstream msg;
    msg << who << ": weights (" << weights.size() << ") and noise_var ("
        << noise_var.size() << ") must both have one entry per user";
    throw std::invalid_argument(msg.str());
  }
  for (int k = 0; k < noise_var.size(); ++k) {
    if (!(noise_var(k) > 0.0)) {
      std::ostringstream msg;
      msg << who << ": noise_var[" << k << "] must be > 0, got "
          << noise_var(k);
      throw std::invalid_argument(msg.str());
    }
  }
}

}  // namespace

double sinr(const Eigen::VectorXcd& precoder,
            const Eigen::VectorXcd& effective_channel, int users, int user,
            double noise_var) {
  check_stacking(precoder, effective_channel, users, "sinr");
  if (user < 0 || user >= users) {
    throw std::invalid_argument("sinr: user index out of range");
  }
  if (!(noise_var > 0.0)) {
    throw std::invalid_argument("sinr: noise_var must be > 0");
  }
  const int m = static_cast<int>(precoder.size()) / users;
  double signal = 0.0;
  double interference = 0.0;
  for (int j = 0; j < users; ++j) {
    const double power = std::norm(
        effective_channel.segment(user * m, m).dot(precoder.segment(j * m, m)));
    if (j == user) {
      signal = power;
    } else {
      interference += power;
    }
  }
  return signal / (interference + noise_var);
}

double sumrate(const Eigen::VectorXcd& precoder,
               const Eigen::VectorXcd& effective_channel,
               const Eigen::VectorXd& weights,
               const Eigen::VectorXd& noise_var) {
  check_per_user(weights, noise_var, "sumrate");
  const int users = static_cast<int>(weights.size());
  check_stacking(precoder, effective_channel, users, "sumrate");
  const Eigen::MatrixXcd a = inner_products(precoder, effective_channel, users);
  double total = 0.0;
  for (int k = 0; k < users; ++k) {
    double received = 0.0;
    for (int j = 0; j < users; ++j) received += std::norm(a(k, j));
    const double interference = received - std::norm(a(k, k));
    total += weights(k) *
             std::log2(1.0 + std::norm(a(k, k)) / (interference + noise_var(k)));
  }
  return total;
}

Eigen::VectorXcd cogradient(const Eigen::VectorXcd& precoder,
                            const Eigen::VectorXcd& effective_channel,
                            const Eigen::VectorXd& weights,
                            const Eigen::VectorXd& noise_var) {
  check_per_user(weights, noise_var, "cogradient");
  const int users = static_cast<int>(weights.size());
  check_stacking(precoder, effective_channel, users, "cogradient");
  const int m = static_cast<int>(precoder.size()) / users;
  const Eigen::MatrixXcd a = inner_products(precoder, effective_channel, users);

  Eigen::VectorXcd g = Eigen::VectorXcd::Zero(precoder.size());
  for (int k = 0; k < users; ++k) {
    double received = 0.0;
    for (int j = 0; j < users; ++j) received += std::norm(a(k, j));
    const double denom_all = received + noise_var(k);
    const double denom_int = denom_all - std::norm(a(k, k));

    // d|a_{k,j}|^2 / d h_k = a_{k,j} * conj(w_j) with conj(h_k) held fixed.
    Eigen::VectorXcd sum_all = Eigen::VectorXcd::Zero(m);
    for (int j = 0; j < users; ++j) {
      sum_all += a(k, j) * precoder.segment(j * m, m).conjugate();
    }
    const Eigen::VectorXcd sum_interf =
        sum_all - a(k, k) * precoder.segment(k * m, m).conjugate();
    g.segment(k * m, m) = (weights(k) / kLn2) *
                          (sum_all / denom_all - sum_interf / denom_int);
  }
  return g;
}

Eigen::VectorXd assemble_real_gradient(const Eigen::MatrixXcd& jacobian,
                                       const Eigen::VectorXcd& cogradient) {
  if (jacobian.rows() != cogradient.size()) {
    std::ostringstream msg;
    msg << "assemble_real_gradient: jacobian has " << jacobian.rows()
        << " rows, cogradient has " << cogradient.size() << " entries";
    throw std::invalid_argument(msg.str());
  }
  return 2.0 * (jacobian.transpose() * cogradient).real();
}

}  // namespace zobeam
