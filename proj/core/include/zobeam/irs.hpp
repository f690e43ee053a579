// Reflection models of a reconfigurable intelligent surface and the feasible
// set of its tunable parameters.
//
// Two element models are supported:
//  * ideal:    each element has a free amplitude in [0, 1] and a free phase,
//              reflection r_e = A_e * exp(j * phi_e);
//  * varactor: each element is a lossy resonant circuit tuned by one varactor
//              capacitance, so amplitude and phase are coupled through the
//              circuit's reflection coefficient.
//
// The optimizer variable theta stacks per-element parameters:
//  * ideal:    theta = [amplitudes(S); phases(S)], dimension 2S;
//  * varactor: theta = capacitances in picofarads, dimension S. Picofarads
//              keep the feasible box O(1), the same scale as the ideal box,
//              so one step-size/smoothing configuration serves both models.
#pragma once

#include <Eigen/Dense>

#include <vector>

#include "zobeam/rng.hpp"

namespace zobeam {

enum class IrsKind { ideal, varactor };

// Axis-aligned box of feasible parameters. Bounds must be finite with
// lower(i) < upper(i) for every component.
struct ParameterBox {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  int dim() const { return static_cast<int>(lower.size()); }
  bool contains(const Eigen::VectorXd& theta, double tol = 0.0) const;
};

// Throws std::invalid_argument when the box is malformed.
void validate_box(const ParameterBox& box);

// Componentwise clamp of theta onto the box. Identity on interior points,
// idempotent, and nonexpansive in the Euclidean norm.
Eigen::VectorXd project(const Eigen::VectorXd& theta, const ParameterBox& box);

// Uniform draw from the box.
Eigen::VectorXd uniform_in_box(const ParameterBox& box, Rng& rng);

// Per-element reflection r_e = A_e * exp(j * phi_e). Inputs must have equal
// length. Amplitudes outside [0, 1] are accepted: smoothing probes evaluate
// the map slightly outside the feasible box by design.
Eigen::VectorXcd reflection_ideal(const Eigen::VectorXd& amplitudes,
                                  const Eigen::VectorXd& phases);

// Varactor-loaded element circuit: a series R_s + L_s + C(var) branch in
// parallel with a patch inductance L_p, terminated against the free-space
// impedance. Defaults give a monotone phase response covering more than 270
// degrees over the capacitance range.
struct VaractorCircuit {
  double frequency_hz = 5.0e9;
  double series_resistance_ohms = 1.0;
  double series_inductance_henries = 0.7e-9;
  double patch_inductance_henries = 2.5e-9;
  double z0_ohms = 376.73;
  double capacitance_min_picofarads = 0.2;
  double capacitance_max_picofarads = 2.0;
};

// Throws std::invalid_argument when a circuit constant is out of range.
void validate_circuit(const VaractorCircuit& circuit);

// Elementwise reflection coefficient Gamma(C) of the loaded element.
// Capacitances are in farads and must be strictly positive. Passive for any
// nonnegative series resistance: |Gamma| <= 1, with equality when R_s = 0.
Eigen::VectorXcd reflection_varactor(const Eigen::VectorXd& capacitance_farads,
                                     const VaractorCircuit& circuit);

// Elementwise derivative dGamma/dC in 1/farads, for gradient diagnostics.
Eigen::VectorXcd reflection_varactor_derivative(
    const Eigen::VectorXd& capacitance_farads, const VaractorCircuit& circuit);

// Sparse jacobian of the reflection map: theta component s drives exactly
// one element, element[s], with complex derivative deriv[s] = d r / d theta_s.
struct ReflectionJacobian {
  std::vector<int> element;
  Eigen::VectorXcd deriv;
};

// Bundles the element model with its size and circuit so channel code can
// map optimizer variables to reflections without caring about the kind.
struct IrsMap {
  IrsKind kind = IrsKind::ideal;
  int elements = 0;
  VaractorCircuit circuit;

  int theta_dim() const {
    return kind == IrsKind::ideal ? 2 * elements : elements;
  }

  // Feasible box: [0,1]^S x [-2pi,2pi]^S for ideal elements (phases are not
  // wrapped; the redundant double cover keeps the set simple), and the
  // circuit's capacitance range in picofarads for varactor elements.
  ParameterBox feasible_box() const;

  Eigen::VectorXcd reflection(const Eigen::VectorXd& theta) const;
  ReflectionJacobian reflection_jacobian(const Eigen::VectorXd& theta) const;
};

}  // namespace zobeam
