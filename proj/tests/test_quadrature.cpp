#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "casimir/constants.hpp"
#include "casimir/quadrature.hpp"

using namespace casimir;
using Catch::Approx;

TEST_CASE("Gauss-Legendre rule integrates polynomials exactly") {
  const auto rule = quad::legendre_rule(16);
  double w_sum = 0.0, x2 = 0.0, x14 = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    w_sum += rule.weights[i];
    x2 += rule.weights[i] * rule.nodes[i] * rule.nodes[i];
    x14 += rule.weights[i] * std::pow(rule.nodes[i], 14);
  }
  CHECK(w_sum == Approx(2.0).epsilon(1e-14));
  CHECK(x2 == Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(x14 == Approx(2.0 / 15.0).epsilon(1e-13));
}

TEST_CASE("adaptive integrator on smooth and endpoint-singular integrands") {
  // int_0^pi sin = 2
  CHECK(quad::integrate_adaptive([](double x) { return std::sin(x); }, 0.0, constants::pi, 1e-10) ==
        Approx(2.0).epsilon(1e-10));

  // int_0^inf y^2 e^{-y}/(1-e^{-y}) dy = 2 zeta(3); tail beyond 60 is ~1e-26
  const double i_pressure = quad::integrate_adaptive(
      [](double y) {
        const double ey = std::exp(-y);
        return y * y * ey / (-std::expm1(-y));
      },
      0.0, 60.0, 1e-10);
  CHECK(i_pressure == Approx(2.0 * constants::zeta3).epsilon(1e-9));

  // int_0^inf y ln(1-e^{-y}) dy = -zeta(3); integrand has a y ln y endpoint
  const double i_energy = quad::integrate_adaptive(
      [](double y) { return y * std::log1p(-std::exp(-y)); }, 0.0, 60.0, 1e-10);
  CHECK(i_energy == Approx(-constants::zeta3).epsilon(1e-9));

  // int_0^inf y^3 e^{-y}/(1-e^{-y}) dy = 6 zeta(4) = pi^4/15
  const double i4 = quad::integrate_adaptive(
      [](double y) {
        const double ey = std::exp(-y);
        return y * y * y * ey / (-std::expm1(-y));
      },
      0.0, 70.0, 1e-10);
  CHECK(i4 == Approx(std::pow(constants::pi, 4) / 15.0).epsilon(1e-9));
}

TEST_CASE("Gauss-Laguerre moments and a transcendental check") {
  for (int n : {64, 128, 256}) {
    const auto rule = quad::laguerre_rule(n);
    double m0 = 0.0, m1 = 0.0, m2 = 0.0, m3 = 0.0, fcos = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double x = rule.nodes[i], w = rule.weights[i];
      m0 += w;
      m1 += w * x;
      m2 += w * x * x;
      m3 += w * x * x * x;
      fcos += w * std::cos(x);
    }
    INFO("n = " << n);
    CHECK(m0 == Approx(1.0).epsilon(5e-11));
    CHECK(m1 == Approx(1.0).epsilon(5e-11));
    CHECK(m2 == Approx(2.0).epsilon(5e-11));
    CHECK(m3 == Approx(6.0).epsilon(5e-11));
    // int_0^inf e^{-x} cos x dx = 1/2
    CHECK(fcos == Approx(0.5).epsilon(1e-10));
  }
}

TEST_CASE("Kahan accumulator compensates ill-ordered sums") {
  KahanSum acc;
  acc.add(1.0);
  for (int i = 0; i < 10000000; ++i) acc.add(1e-16);
  CHECK(acc.value() == Approx(1.0 + 1e-9).epsilon(1e-12));
}
