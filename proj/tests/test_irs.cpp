#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <stdexcept>

#include "zobeam/irs.hpp"
#include "zobeam/rng.hpp"

using namespace zobeam;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Unwraps a phase sequence by accumulating deltas folded into (-pi, pi].
Eigen::VectorXd unwrap(const Eigen::VectorXd& phase) {
  Eigen::VectorXd out(phase.size());
  out(0) = phase(0);
  for (int i = 1; i < phase.size(); ++i) {
    double delta = phase(i) - phase(i - 1);
    while (delta > kPi) delta -= 2 * kPi;
    while (delta <= -kPi) delta += 2 * kPi;
    out(i) = out(i - 1) + delta;
  }
  return out;
}

}  // namespace

TEST_CASE("ideal reflection basics") {
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(4);
  Eigen::VectorXd zeros = Eigen::VectorXd::Zero(4);
  Eigen::VectorXcd r = reflection_ideal(ones, zeros);
  for (int i = 0; i < 4; ++i) {
    CHECK(r(i).real() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(r(i).imag() == doctest::Approx(0.0).epsilon(1e-15));
  }

  Eigen::VectorXd phases(4);
  phases << 0.3, -1.2, 2.9, 4.4;
  r = reflection_ideal(zeros, phases);
  CHECK(r.norm() == 0.0);

  Eigen::VectorXd a1(1), p1(1);
  a1 << 0.5;
  p1 << kPi / 2;
  r = reflection_ideal(a1, p1);
  CHECK(std::abs(r(0) - std::complex<double>(0.0, 0.5)) < 1e-12);
}

TEST_CASE("ideal reflection magnitude equals amplitude") {
  Rng rng(11);
  Eigen::VectorXd amp(32), phase(32);
  for (int i = 0; i < 32; ++i) {
    amp(i) = rng.uniform();
    phase(i) = rng.uniform(-2 * kPi, 2 * kPi);
  }
  Eigen::VectorXcd r = reflection_ideal(amp, phase);
  for (int i = 0; i < 32; ++i) {
    CHECK(std::abs(r(i)) == doctest::Approx(amp(i)).epsilon(1e-12));
  }
}

TEST_CASE("ideal reflection rejects mismatched lengths") {
  CHECK_THROWS_AS(
      reflection_ideal(Eigen::VectorXd::Ones(3), Eigen::VectorXd::Zero(4)),
      std::invalid_argument);
}

TEST_CASE("lossless varactor element is unimodular") {
  VaractorCircuit c;
  c.series_resistance_ohms = 0.0;
  Eigen::VectorXd caps(200);
  for (int i = 0; i < caps.size(); ++i) {
    caps(i) = (0.2 + 1.8 * i / (caps.size() - 1.0)) * 1e-12;
  }
  Eigen::VectorXcd gamma = reflection_varactor(caps, c);
  for (int i = 0; i < gamma.size(); ++i) {
    CHECK(std::abs(std::abs(gamma(i)) - 1.0) < 1e-9);
  }
}

TEST_CASE("varactor element is passive for any series resistance") {
  Rng rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    VaractorCircuit c;
    c.frequency_hz = rng.uniform(1e9, 10e9);
    c.series_resistance_ohms = rng.uniform(0.0, 10.0);
    c.series_inductance_henries = rng.uniform(0.1e-9, 5e-9);
    c.patch_inductance_henries = rng.uniform(0.1e-9, 5e-9);
    Eigen::VectorXd cap(1);
    cap << rng.uniform(0.05e-12, 5e-12);
    c.capacitance_min_picofarads = 0.01;
    c.capacitance_max_picofarads = 10.0;
    Eigen::VectorXcd gamma = reflection_varactor(cap, c);
    CHECK(std::abs(gamma(0)) <= 1.0 + 1e-12);
  }
}

TEST_CASE("default varactor circuit sweeps a monotone phase over 270 degrees") {
  VaractorCircuit c;
  const int n = 2000;
  Eigen::VectorXd caps(n);
  for (int i = 0; i < n; ++i) {
    caps(i) = (c.capacitance_min_picofarads +
               (c.capacitance_max_picofarads - c.capacitance_min_picofarads) *
                   i / (n - 1.0)) *
              1e-12;
  }
  Eigen::VectorXcd gamma = reflection_varactor(caps, c);
  Eigen::VectorXd phase(n);
  for (int i = 0; i < n; ++i) phase(i) = std::arg(gamma(i));
  Eigen::VectorXd u = unwrap(phase);

  bool monotone = true;
  for (int i = 1; i < n; ++i) {
    if (u(i) - u(i - 1) > 0.0) monotone = false;  // response descends
  }
  CHECK(monotone);
  CHECK(std::abs(u(n - 1) - u(0)) > 270.0 * kPi / 180.0);
}

TEST_CASE("varactor derivative matches central differences") {
  VaractorCircuit c;
  Rng rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd cap(1);
    cap << rng.uniform(0.25e-12, 1.9e-12);
    std::complex<double> d = reflection_varactor_derivative(cap, c)(0);
    for (double rel_step : {1e-6, 1e-7}) {
      const double h = rel_step * cap(0);
      Eigen::VectorXd hi = cap.array() + h;
      Eigen::VectorXd lo = cap.array() - h;
      std::complex<double> fd =
          (reflection_varactor(hi, c)(0) - reflection_varactor(lo, c)(0)) /
          (2.0 * h);
      CHECK(std::abs(fd - d) / std::abs(d) < 1e-2);
    }
  }
}

TEST_CASE("varactor rejects nonpositive capacitance") {
  VaractorCircuit c;
  Eigen::VectorXd cap(2);
  cap << 1e-12, -1e-12;
  CHECK_THROWS_AS(reflection_varactor(cap, c), std::invalid_argument);
  cap << 0.0, 1e-12;
  CHECK_THROWS_AS(reflection_varactor(cap, c), std::invalid_argument);
}

TEST_CASE("projection clamps, fixes interior points, and is idempotent") {
  IrsMap map{IrsKind::ideal, 3, {}};
  ParameterBox box = map.feasible_box();
  CHECK(box.dim() == 6);

  Eigen::VectorXd inside(6);
  inside << 0.2, 0.8, 0.5, -1.0, 0.0, 6.0;
  CHECK((project(inside, box) - inside).norm() == 0.0);

  Eigen::VectorXd outside(6);
  outside << 1.2, -0.1, 0.5, 7.0, -7.0, 0.0;
  Eigen::VectorXd p = project(outside, box);
  CHECK(p(0) == 1.0);
  CHECK(p(1) == 0.0);
  CHECK(p(3) == doctest::Approx(2 * kPi));
  CHECK(p(4) == doctest::Approx(-2 * kPi));
  CHECK((project(p, box) - p).norm() == 0.0);
}

TEST_CASE("projection is nonexpansive") {
  IrsMap map{IrsKind::ideal, 8, {}};
  ParameterBox box = map.feasible_box();
  Rng rng(47);
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd x(box.dim()), y(box.dim());
    for (int i = 0; i < box.dim(); ++i) {
      x(i) = rng.uniform(-10.0, 10.0);
      y(i) = rng.uniform(-10.0, 10.0);
    }
    CHECK((project(x, box) - project(y, box)).norm() <=
          (x - y).norm() + 1e-12);
  }
}

TEST_CASE("projection rejects dimension mismatch") {
  IrsMap map{IrsKind::ideal, 3, {}};
  ParameterBox box = map.feasible_box();
  CHECK_THROWS_AS(project(Eigen::VectorXd::Zero(5), box),
                  std::invalid_argument);
}

TEST_CASE("irs map jacobians match directional finite differences") {
  Rng rng(53);
  for (IrsKind kind : {IrsKind::ideal, IrsKind::varactor}) {
    IrsMap map{kind, 6, {}};
    ParameterBox box = map.feasible_box();
    Eigen::VectorXd theta = uniform_in_box(box, rng);
    // Stay clear of the box edge so centered probes remain valid.
    theta = 0.9 * theta + 0.1 * (box.lower + box.upper) / 2.0;

    ReflectionJacobian jac = map.reflection_jacobian(theta);
    Eigen::VectorXd v(map.theta_dim());
    for (int i = 0; i < v.size(); ++i) v(i) = rng.normal();

    const double eps = 1e-6;
    Eigen::VectorXcd fd =
        (map.reflection(theta + eps * v) - map.reflection(theta - eps * v)) /
        (2.0 * eps);
    Eigen::VectorXcd analytic = Eigen::VectorXcd::Zero(map.elements);
    for (int s = 0; s < map.theta_dim(); ++s) {
      analytic(jac.element[s]) += jac.deriv(s) * v(s);
    }
    CHECK((fd - analytic).norm() / analytic.norm() < 1e-6);
  }
}

TEST_CASE("uniform draws land inside the box") {
  IrsMap map{IrsKind::varactor, 16, {}};
  ParameterBox box = map.feasible_box();
  Rng rng(61);
  for (int trial = 0; trial < 20; ++trial) {
    CHECK(box.contains(uniform_in_box(box, rng)));
  }
}
