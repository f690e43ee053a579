#include "zobeam/irs.hpp"

#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>

namespace zobeam {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

}  // namespace

bool ParameterBox::contains(const Eigen::VectorXd& theta, double tol) const {
  if (theta.size() != lower.size()) return false;
  for (int i = 0; i < theta.size(); ++i) {
    if (theta(i) < lower(i) - tol || theta(i) > upper(i) + tol) return false;
  }
  return true;
}

void validate_box(const ParameterBox& box) {
  require(box.lower.size() == box.upper.size(),
          "parameter box: lower and upper bounds differ in length");
  require(box.lower.size() > 0, "parameter box: empty bounds");
  for (int i = 0; i < box.lower.size(); ++i) {
    if (!std::isfinite(box.lower(i)) || !std::isfinite(box.upper(i)) ||
        !(box.lower(i) < box.upper(i))) {
      std::ostringstream msg;
      msg << "parameter box: component " << i << " has invalid bounds ["
          << box.lower(i) << ", " << box.upper(i) << "]";
      throw std::invalid_argument(msg.str());
    }
  }
}

Eigen::VectorXd project(const Eigen::VectorXd& theta, const ParameterBox& box) {
  if (theta.size() != box.lower.size()) {
    std::ostringstream msg;
    msg << "project: theta has length " << theta.size() << ", box has dimension "
        << box.lower.size();
    throw std::invalid_argument(msg.str());
  }
  return theta.cwiseMax(box.lower).cwiseMin(box.upper);
}

Eigen::VectorXd uniform_in_box(const ParameterBox& box, Rng& rng) {
  Eigen::VectorXd theta(box.dim());
  for (int i = 0; i < theta.size(); ++i) {
    theta(i) = rng.uniform(box.lower(i), box.upper(i));
  }
  return theta;
}

Eigen::VectorXcd reflection_ideal(const Eigen::VectorXd& amplitudes,
                                  const Eigen::VectorXd& phases) {
  if (amplitudes.size() != phases.size()) {
    std::ostringstream msg;
    msg << "reflection_ideal: " << amplitudes.size() << " amplitudes vs "
        << phases.size() << " phases";
    throw std::invalid_argument(msg.str());
  }
  Eigen::VectorXcd r(amplitudes.size());
  for (int i = 0; i < r.size(); ++i) {
    r(i) = std::polar(amplitudes(i), phases(i));
  }
  return r;
}

void validate_circuit(const VaractorCircuit& c) {
  require(c.frequency_hz > 0.0, "varactor circuit: frequency_hz must be > 0");
  require(c.series_resistance_ohms >= 0.0,
          "varactor circuit: series_resistance_ohms must be >= 0");
  require(c.series_inductance_henries > 0.0,
          "varactor circuit: series_inductance_henries must be > 0");
  require(c.patch_inductance_henries > 0.0,
          "varactor circuit: patch_inductance_henries must be > 0");
  require(c.z0_ohms > 0.0, "varactor circuit: z0_ohms must be > 0");
  require(c.capacitance_min_picofarads > 0.0,
          "varactor circuit: capacitance_min_picofarads must be > 0");
  require(c.capacitance_max_picofarads > c.capacitance_min_picofarads,
          "varactor circuit: capacitance range is empty");
}

namespace {

// Gamma = (Z - Z0)/(Z + Z0) with Z = (jwLp * Zd)/(jwLp + Zd). Substituting
// Z = N/D and clearing the fraction avoids the overflow at the parallel
// resonance where jwLp + Zd -> 0 (there Gamma -> 1 smoothly).
std::complex<double> gamma_of_capacitance(double cap_farads,
                                          const VaractorCircuit& c,
                                          std::complex<double>* dgamma_dc) {
  const double w = kTwoPi * c.frequency_hz;
  const std::complex<double> j(0.0, 1.0);
  const std::complex<double> zd(c.series_resistance_ohms,
                                w * c.series_inductance_henries -
                                    1.0 / (w * cap_farads));
  const std::complex<double> a = j * (w * c.patch_inductance_henries);
  const std::complex<double> n = a * zd;          // numerator of Z
  const std::complex<double> d = a + zd;          // denominator of Z
  const std::complex<double> q = n + c.z0_ohms * d;
  const std::complex<double> gamma = (n - c.z0_ohms * d) / q;
  if (dgamma_dc != nullptr) {
    // dGamma/dZd collapses to 2*Z0*a^2 / q^2; the chain rule through
    // dZd/dC = j/(w C^2) gives the capacitance sensitivity.
    const std::complex<double> dgamma_dzd = 2.0 * c.z0_ohms * a * a / (q * q);
    *dgamma_dc = dgamma_dzd * (j / (w * cap_farads * cap_farads));
  }
  return gamma;
}

void require_positive_caps(const Eigen::VectorXd& cap_farads) {
  for (int i = 0; i < cap_farads.size(); ++i) {
    if (!(cap_farads(i) > 0.0)) {
      std::ostringstream msg;
      msg << "reflection_varactor: capacitance " << i << " is "
          << cap_farads(i) << " F; capacitances must be > 0";
      throw std::invalid_argument(msg.str());
    }
  }
}

}  // namespace

Eigen::VectorXcd reflection_varactor(const Eigen::VectorXd& capacitance_farads,
                                     const VaractorCircuit& circuit) {
  validate_circuit(circuit);
  require_positive_caps(capacitance_farads);
  Eigen::VectorXcd gamma(capacitance_farads.size());
  for (int i = 0; i < gamma.size(); ++i) {
    gamma(i) = gamma_of_capacitance(capacitance_farads(i), circuit, nullptr);
  }
  return gamma;
}

Eigen::VectorXcd reflection_varactor_derivative(
    const Eigen::VectorXd& capacitance_farads, const VaractorCircuit& circuit) {
  validate_circuit(circuit);
  require_positive_caps(capacitance_farads);
  Eigen::VectorXcd deriv(capacitance_farads.size());
  for (int i = 0; i < deriv.size(); ++i) {
    std::complex<double> d;
    gamma_of_capacitance(capacitance_farads(i), circuit, &d);
    deriv(i) = d;
  }
  return deriv;
}

ParameterBox IrsMap::feasible_box() const {
  require(elements > 0, "irs map: element count must be > 0");
  ParameterBox box;
  if (kind == IrsKind::ideal) {
    box.lower.resize(2 * elements);
    box.upper.resize(2 * elements);
    box.lower.head(elements).setConstant(0.0);
    box.upper.head(elements).setConstant(1.0);
    box.lower.tail(elements).setConstant(-kTwoPi);
    box.upper.tail(elements).setConstant(kTwoPi);
  } else {
    validate_circuit(circuit);
    box.lower = Eigen::VectorXd::Constant(elements,
                                          circuit.capacitance_min_picofarads);
    box.upper = Eigen::VectorXd::Constant(elements,
                                          circuit.capacitance_max_picofarads);
  }
  return box;
}

Eigen::VectorXcd IrsMap::reflection(const Eigen::VectorXd& theta) const {
  if (theta.size() != theta_dim()) {
    std::ostringstream msg;
    msg << "irs map: theta has length " << theta.size() << ", expected "
        << theta_dim();
    throw std::invalid_argument(msg.str());
  }
  if (kind == IrsKind::ideal) {
    return reflection_ideal(theta.head(elements), theta.tail(elements));
  }
  return reflection_varactor(theta * 1e-12, circuit);
}

ReflectionJacobian IrsMap::reflection_jacobian(
    const Eigen::VectorXd& theta) const {
  if (theta.size() != theta_dim()) {
    throw std::invalid_argument("irs map: theta dimension mismatch");
  }
  ReflectionJacobian jac;
  jac.element.resize(theta_dim());
  jac.deriv.resize(theta_dim());
  if (kind == IrsKind::ideal) {
    for (int e = 0; e < elements; ++e) {
      const std::complex<double> phase = std::polar(1.0, theta(elements + e));
      jac.element[e] = e;
      jac.deriv(e) = phase;  // d r / d amplitude
      jac.element[elements + e] = e;
      jac.deriv(elements + e) =
          std::complex<double>(0.0, 1.0) * theta(e) * phase;  // d r / d phase
    }
  } else {
    // theta is in picofarads; the circuit derivative is per farad.
    const Eigen::VectorXcd d =
        reflection_varactor_derivative(theta * 1e-12, circuit);
    for (int e = 0; e < elements; ++e) {
      jac.element[e] = e;
      jac.deriv(e) = d(e) * 1e-12;
    }
  }
  return jac;
}

}  // namespace zobeam
