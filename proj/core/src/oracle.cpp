#include "zobeam/oracle.hpp"

#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>

#include "zobeam/rng.hpp"
#include "zobeam/utility.hpp"

namespace zobeam {

namespace {

constexpr double kLn2 = 0.69314718055994530942;

void check_problem(const Eigen::VectorXcd& channel,
                   const DownlinkProblem& problem, const char* who) {
  const int users = static_cast<int>(problem.weights.size());
  if (users < 1 || problem.noise_var.size() != users) {
    std::ostringstream msg;
    msg << who << ": weights (" << problem.weights.size()
        << ") and noise_var (" << problem.noise_var.size()
        << ") must both have one entry per user";
    throw std::invalid_argument(msg.str());
  }
  if (channel.size() == 0 || channel.size() % users != 0) {
    std::ostringstream msg;
    msg << who << ": channel length " << channel.size()
        << " is not a nonzero multiple of " << users << " users";
    throw std::invalid_argument(msg.str());
  }
  if (!(problem.power_budget > 0.0)) {
    std::ostringstream msg;
    msg << who << ": power_budget must be > 0, got " << problem.power_budget;
    throw std::invalid_argument(msg.str());
  }
  for (int k = 0; k < users; ++k) {
    if (!(problem.noise_var(k) > 0.0)) {
      std::ostringstream msg;
      msg << who << ": noise_var[" << k << "] must be > 0";
      throw std::invalid_argument(msg.str());
    }
    if (!(problem.weights(k) >= 0.0)) {
      std::ostringstream msg;
      msg << who << ": weights[" << k << "] must be >= 0";
      throw std::invalid_argument(msg.str());
    }
  }
}

// Scales the precoder onto the power ball when it spends more than P.
void clip_to_ball(Eigen::VectorXcd& w, double power_budget) {
  const double power = w.squaredNorm();
  if (power > power_budget) {
    w *= std::sqrt(power_budget / power);
  }
}

// Ascent direction 2 dF/dconj(W) of the sum rate in the stacked precoder.
Eigen::VectorXcd precoder_gradient(const Eigen::VectorXcd& w,
                                   const Eigen::VectorXcd& h,
                                   const DownlinkProblem& prob) {
  const int users = static_cast<int>(prob.weights.size());
  const int m = static_cast<int>(w.size()) / users;
  Eigen::MatrixXcd a(users, users);
  Eigen::VectorXd received = Eigen::VectorXd::Zero(users);
  for (int k = 0; k < users; ++k) {
    for (int j = 0; j < users; ++j) {
      a(k, j) = h.segment(k * m, m).dot(w.segment(j * m, m));
      received(k) += std::norm(a(k, j));
    }
  }
  Eigen::VectorXcd grad(w.size());
  for (int j = 0; j < users; ++j) {
    Eigen::VectorXcd gj = Eigen::VectorXcd::Zero(m);
    for (int k = 0; k < users; ++k) {
      const double total = received(k) + prob.noise_var(k);
      double coeff = prob.weights(k) / kLn2 / total;
      if (k != j) {
        coeff -= prob.weights(k) / kLn2 /
                 (total - std::norm(a(k, k)));
      }
      gj += (2.0 * coeff) * a(k, j) * h.segment(k * m, m);
    }
    grad.segment(j * m, m) = gj;
  }
  return grad;
}

}  // namespace

DownlinkProblem problem_of(const Scenario& scenario) {
  return {scenario.weights, scenario.noise_var_watts,
          scenario.power_budget_watts};
}

void validate_budget(const OracleBudget& budget) {
  if (budget.max_iterations < 1) {
    std::ostringstream msg;
    msg << "oracle budget: max_iterations must be >= 1, got "
        << budget.max_iterations;
    throw std::invalid_argument(msg.str());
  }
  if (budget.value_tolerance && !(*budget.value_tolerance >= 0.0)) {
    throw std::invalid_argument(
        "oracle budget: value_tolerance must be >= 0 when set");
  }
}

Eigen::VectorXcd matched_filter(const Eigen::VectorXcd& effective_channel,
                                int users, double power_budget) {
  if (users < 1 || effective_channel.size() % users != 0) {
    throw std::invalid_argument("matched_filter: bad user count");
  }
  const double total = effective_channel.squaredNorm();
  if (total < 1e-300) {
    return Eigen::VectorXcd::Zero(effective_channel.size());
  }
  return std::sqrt(power_budget / total) * effective_channel;
}

Eigen::VectorXcd wmmse(const Eigen::VectorXcd& effective_channel,
                       const DownlinkProblem& problem,
                       const OracleBudget& budget, OracleTrace* trace,
                       const Eigen::VectorXcd* warm_start) {
  check_problem(effective_channel, problem, "wmmse");
  validate_budget(budget);
  const int users = static_cast<int>(problem.weights.size());
  const int m = static_cast<int>(effective_channel.size()) / users;
  const double power = problem.power_budget;

  Eigen::VectorXcd w;
  if (warm_start != nullptr) {
    if (warm_start->size() != effective_channel.size()) {
      throw std::invalid_argument("wmmse: warm start has the wrong length");
    }
    w = *warm_start;
    clip_to_ball(w, power);
  } else {
    w = matched_filter(effective_channel, users, power);
  }

  if (trace != nullptr) {
    trace->sumrate_per_iteration.resize(budget.max_iterations);
    trace->iterations_used = 0;
    trace->regularizations = 0;
  }

  double previous_rate =
      sumrate(w, effective_channel, problem.weights, problem.noise_var);

  for (int round = 0; round < budget.max_iterations; ++round) {
    // Receiver and MSE-weight stage. u_k is the scalar MMSE receiver, e_k
    // its (real) error, lambda_k = weight_k / e_k the round's MSE weight.
    Eigen::VectorXcd u(users);
    Eigen::VectorXd lambda(users);
    for (int k = 0; k < users; ++k) {
      const auto h_k = effective_channel.segment(k * m, m);
      double received = problem.noise_var(k);
      std::complex<double> direct(0.0, 0.0);
      for (int j = 0; j < users; ++j) {
        const std::complex<double> a = h_k.dot(w.segment(j * m, m));
        received += std::norm(a);
        if (j == k) direct = a;
      }
      u(k) = direct / received;
      const double e = 1.0 - std::norm(direct) / received;
      lambda(k) = (e <= 1e-12) ? problem.weights(k) * 1e12
                               : problem.weights(k) / e;
    }

    // Precoder stage: all users share the system matrix
    //   B = sum_j lambda_j |u_j|^2 h_j h_j^H,
    // and w_k = (B + nu I)^{-1} lambda_k conj(u_k) h_k with the smallest
    // nu >= 0 that satisfies the power budget. One eigendecomposition makes
    // the transmit power an explicit function of nu for the bisection.
    Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(m, m);
    for (int j = 0; j < users; ++j) {
      const auto h_j = effective_channel.segment(j * m, m);
      b.noalias() += (lambda(j) * std::norm(u(j))) * (h_j * h_j.adjoint());
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(b);
    Eigen::VectorXd evals = eig.eigenvalues();
    const Eigen::MatrixXcd& q = eig.eigenvectors();
    if (evals(0) < 1e-12 * std::max(1.0, evals(m - 1))) {
      evals.array() += 1e-12;
      if (trace != nullptr) ++trace->regularizations;
    }

    Eigen::MatrixXcd beta(m, users);  // beta_k = lambda_k conj(u_k) Q^H h_k
    for (int k = 0; k < users; ++k) {
      beta.col(k) = (lambda(k) * std::conj(u(k))) *
                    (q.adjoint() * effective_channel.segment(k * m, m));
    }
    const auto transmit_power = [&](double nu) {
      double total = 0.0;
      for (int k = 0; k < users; ++k) {
        for (int i = 0; i < m; ++i) {
          const double d = evals(i) + nu;
          total += std::norm(beta(i, k)) / (d * d);
        }
      }
      return total;
    };

    double nu = 0.0;
    if (transmit_power(0.0) > power) {
      double hi = 1.0;
      int doublings = 0;
      while (transmit_power(hi) > power) {
        hi *= 2.0;
        if (++doublings > 100) {
          throw std::runtime_error(
              "wmmse: power bisection failed to bracket the dual variable");
        }
      }
      double lo = 0.0;
      for (int step = 0; step < 100; ++step) {
        const double mid = 0.5 * (lo + hi);
        (transmit_power(mid) > power ? lo : hi) = mid;
      }
      nu = hi;  // feasible side of the bracket
    }
    for (int k = 0; k < users; ++k) {
      w.segment(k * m, m) =
          q * (beta.col(k).array() / (evals.array() + nu)).matrix();
    }

    const double rate =
        sumrate(w, effective_channel, problem.weights, problem.noise_var);
    if (trace != nullptr) {
      trace->sumrate_per_iteration(round) = rate;
      trace->iterations_used = round + 1;
    }
    const double gain = rate - previous_rate;
    previous_rate = rate;
    if (budget.value_tolerance && gain < *budget.value_tolerance) {
      break;
    }
  }

  if (trace != nullptr) {
    trace->sumrate_per_iteration.conservativeResize(trace->iterations_used);
  }
  return w;
}

Eigen::VectorXcd reference_solve(const Eigen::VectorXcd& effective_channel,
                                 const DownlinkProblem& problem,
                                 const ReferenceOptions& options) {
  check_problem(effective_channel, problem, "reference_solve");
  if (options.restarts < 1 || options.steps < 0) {
    throw std::invalid_argument("reference_solve: bad restart/step counts");
  }
  const int users = static_cast<int>(problem.weights.size());
  const int dim = static_cast<int>(effective_channel.size());
  const double power = problem.power_budget;
  const double radius = std::sqrt(power);

  Rng rng(derive_seed(options.seed, 0x5e1f, 0));
  Eigen::VectorXcd best =
      matched_filter(effective_channel, users, power);
  double best_value =
      sumrate(best, effective_channel, problem.weights, problem.noise_var);

  for (int restart = 0; restart < options.restarts; ++restart) {
    Eigen::VectorXcd w(dim);
    if (restart == 0) {
      w = matched_filter(effective_channel, users, power);
    } else {
      for (int i = 0; i < dim; ++i) w(i) = rng.complex_normal();
      const double norm = w.norm();
      if (norm > 0) w *= radius / norm;
    }

    double eta0 = 0.0;
    for (int step = 0; step < options.steps; ++step) {
      const Eigen::VectorXcd grad =
          precoder_gradient(w, effective_channel, problem);
      const double gnorm = grad.norm();
      if (gnorm < 1e-14) break;
      if (step == 0) {
        eta0 = options.step_scale * radius / gnorm;
      }
      const double eta = eta0 / (1.0 + 9.0 * step / options.steps);
      w += eta * grad;
      clip_to_ball(w, power);
      const double value =
          sumrate(w, effective_channel, problem.weights, problem.noise_var);
      if (value > best_value) {
        best_value = value;
        best = w;
      }
    }
  }
  return best;
}

double oracle_error_estimate(const Eigen::VectorXcd& approximate,
                             const Eigen::VectorXcd& reference,
                             const Eigen::VectorXcd& effective_channel,
                             const DownlinkProblem& problem) {
  const double approx_value = sumrate(approximate, effective_channel,
                                      problem.weights, problem.noise_var);
  const double reference_value = sumrate(reference, effective_channel,
                                         problem.weights, problem.noise_var);
  return std::max(0.0, reference_value - approx_value);
}

}  // namespace zobeam
