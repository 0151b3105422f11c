#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "casimir/constants.hpp"
#include "casimir/lifshitz.hpp"

using namespace casimir;
using Catch::Approx;

namespace {

const double kGoldWp22 = constants::hbar_c_eV_nm / 22.0;  // delta = 22 nm exactly

PermittivityModel plasma(double wp) { return PermittivityModel(Plasma{OscillatorSet{}, wp}); }
PermittivityModel drude(double wp, double g) {
  return PermittivityModel(Drude{OscillatorSet{}, wp, g});
}

double ideal_pressure_Pa(double d_nm) {
  using namespace constants;
  return -pi * pi * hbar_c_eV_nm / (240.0 * d_nm * d_nm * d_nm * d_nm) * eV_per_nm3_in_Pa;
}
double ideal_energy_Jm2(double d_nm) {
  using namespace constants;
  return -pi * pi * hbar_c_eV_nm / (720.0 * d_nm * d_nm * d_nm) * eV_per_nm2_in_J_per_m2;
}

}  // namespace

TEST_CASE("ideal-metal limit at T = 0 reproduces the closed forms") {
  PlatePair p{plasma(1e6), plasma(1e6), 1000.0, 0.0};
  CHECK(pressure(p) == Approx(ideal_pressure_Pa(1000.0)).epsilon(1e-4));
  CHECK(pressure(p) == Approx(-1.3002e-3).epsilon(1e-3));
  CHECK(free_energy_per_area(p) == Approx(ideal_energy_Jm2(1000.0)).epsilon(1e-4));
  CHECK(free_energy_per_area(p) == Approx(-4.334e-10).epsilon(1e-3));
}

TEST_CASE("engine anchors against an independent quadrature stack") {
  // Reference values precomputed with nested adaptive quadrature (QUADPACK)
  // and cross-checked by fixed 240/480-node Gauss-Legendre ladders.
  PlatePair plasma_t0{plasma(kGoldWp22), plasma(kGoldWp22), 700.0, 0.0};
  CHECK(pressure(plasma_t0) == Approx(-4.622220018e-3).epsilon(1e-6));

  PlatePair drude_t0{drude(kGoldWp22, 0.035), drude(kGoldWp22, 0.035), 700.0, 0.0};
  CHECK(pressure(drude_t0) == Approx(-4.537312631e-3).epsilon(1e-6));

  PlatePair drude_300{drude(kGoldWp22, 0.035), drude(kGoldWp22, 0.035), 700.0, 300.0};
  CHECK(pressure(drude_300) == Approx(-4.109557161e-3).epsilon(1e-6));

  PlatePair plasma_300{plasma(9.0), plasma(9.0), 700.0, 300.0};
  CHECK(pressure(plasma_300) == Approx(-4.627826716e-3).epsilon(1e-6));
}

TEST_CASE("classical limit: plasma free energy doubles the Drude one") {
  // Far separation at 300 K leaves only the l = 0 term; near-ideal metal.
  PlatePair p{plasma(1e5), plasma(1e5), 20000.0, 300.0};
  PlatePair d{drude(1e5, 0.035), drude(1e5, 0.035), 20000.0, 300.0};
  CHECK(free_energy_per_area(p) / free_energy_per_area(d) == Approx(2.0).epsilon(1e-4));

  // and the classical Drude free energy is -kB T zeta(3) / (16 pi d^2)
  using namespace constants;
  const double classical =
      -k_B_eV_per_K * 300.0 * zeta3 / (16.0 * pi * 2e4 * 2e4) * eV_per_nm2_in_J_per_m2;
  CHECK(free_energy_per_area(d) == Approx(classical).epsilon(1e-4));
}

TEST_CASE("pressure equals the negative separation derivative of the free energy") {
  auto check_pair = [](PlatePair base) {
    base.truncation.rel_tol = 1e-11;
    base.quadrature.rel_tol = 1e-11;
    const double d = base.separation_nm;
    const double h = 0.01 * d;
    auto f = [&](double dd) {
      PlatePair p = base;
      p.separation_nm = dd;
      return free_energy_per_area(p);
    };
    // 5-point central stencil for dF/dd
    const double deriv =
        (f(d - 2 * h) - 8.0 * f(d - h) + 8.0 * f(d + h) - f(d + 2 * h)) / (12.0 * h);
    const double p_direct = pressure(base);  // Pa
    const double p_fd = -deriv * 1e9;        // J/m^2 per nm -> J/m^3 = Pa
    CHECK(p_direct == Approx(p_fd).epsilon(1e-6));
  };
  check_pair({plasma(9.0), plasma(9.0), 1000.0, 0.0});
  check_pair({plasma(9.0), plasma(9.0), 500.0, 300.0});
  check_pair({drude(9.0, 0.035), drude(9.0, 0.035), 700.0, 300.0});
}

TEST_CASE("attraction weakens monotonically with separation") {
  for (double T : {0.0, 300.0}) {
    for (const auto& m : {plasma(9.0), drude(9.0, 0.035),
                          PermittivityModel(DcConductivity{OscillatorSet({{120.0, 5.0, 0.2}}), 1e-3}),
                          PermittivityModel(CoreOnly{OscillatorSet({{120.0, 5.0, 0.2}})})}) {
      double prev = -std::numeric_limits<double>::infinity();
      for (double d : {100.0, 300.0, 1000.0, 3000.0, 10000.0}) {
        PlatePair p{m, m, d, T};
        const double f = free_energy_per_area(p);
        CHECK(f < 0.0);
        CHECK(f > prev);  // |F| decreasing
        prev = f;
      }
    }
  }
}

TEST_CASE("halving the truncation tolerance moves the pressure by less than the tolerance") {
  PlatePair p{drude(9.0, 0.035), drude(9.0, 0.035), 700.0, 300.0};
  p.truncation.rel_tol = 1e-6;
  const double p1 = pressure(p);
  p.truncation.rel_tol = 5e-7;
  const double p2 = pressure(p);
  CHECK(std::abs(p1 - p2) <= 1e-6 * std::abs(p1));
}

TEST_CASE("plasma pressure dominates Drude and reaches q = 2 classically") {
  double prev_ratio = 1.0;
  for (double d : {700.0, 2000.0, 10000.0}) {
    PlatePair pp{plasma(9.0), plasma(9.0), d, 300.0};
    PlatePair pd{drude(9.0, 0.035), drude(9.0, 0.035), d, 300.0};
    const double ratio = pressure(pp) / pressure(pd);
    CHECK(ratio > 1.0);
    CHECK(ratio <= 2.0);
    CHECK(ratio > prev_ratio);  // approaches 2 with growing d T
    prev_ratio = ratio;
  }
  CHECK(prev_ratio == Approx(1.986927).epsilon(1e-4));
}

TEST_CASE("classical term") {
  using namespace constants;
  const double d = 1000.0, T = 300.0;
  // TE zero mode dead: only the TM ideal term survives
  PlatePair drude_ideal{drude(1e5, 0.035), drude(1e5, 0.035), d, T};
  const double drude_classical = -k_B_eV_per_K * T * zeta3 / (8.0 * pi * d * d * d) * eV_per_nm3_in_Pa;
  CHECK(classical_term(drude_ideal) == Approx(drude_classical).epsilon(1e-8));

  // plasma keeps the TE zero mode: twice the Drude value in the ideal limit
  PlatePair plasma_ideal{plasma(1e5), plasma(1e5), d, T};
  CHECK(classical_term(plasma_ideal) == Approx(2.0 * drude_classical).epsilon(1e-4));

  // weight proportional to T
  PlatePair cold = drude_ideal;
  cold.temperature_K = 1e-5;
  CHECK(std::abs(classical_term(cold)) < 1e-10);
  CHECK(classical_term(cold) / 1e-5 == Approx(drude_classical / T).epsilon(1e-6));
}

TEST_CASE("high-temperature entropy matches the classical closed forms") {
  using namespace constants;
  const double d = 5000.0, T = 2000.0;
  PlatePair di{drude(1e5, 0.035), drude(1e5, 0.035), d, T};
  const double s_drude = k_B_eV_per_K * zeta3 / (16.0 * pi * d * d) * eV_per_nm2_in_J_per_m2;
  CHECK(entropy_per_area(di) == Approx(s_drude).epsilon(1e-3));
  CHECK(entropy_per_area(di) > 0.0);

  PlatePair pi_{plasma(1e5), plasma(1e5), d, T};
  CHECK(entropy_per_area(pi_) == Approx(2.0 * s_drude).epsilon(1e-3));
}

TEST_CASE("results are bit-identical across worker counts") {
  PlatePair base{drude(9.0, 0.035), drude(9.0, 0.035), 700.0, 300.0};
  PlatePair threaded = base;
  threaded.threads = 4;
  CHECK(pressure(base) == pressure(threaded));
  CHECK(free_energy_per_area(base) == free_energy_per_area(threaded));

  PlatePair cold = base, cold_threaded = threaded;
  cold.temperature_K = cold_threaded.temperature_K = 30.0;
  CHECK(pressure(cold) == pressure(cold_threaded));
}

TEST_CASE("ladder and policy validation") {
  CHECK_THROWS_AS(MatsubaraLadder(-1.0), std::domain_error);
  CHECK_THROWS_AS(MatsubaraLadder(300.0, TruncationPolicy{1e-2, 100000}), std::domain_error);
  CHECK_THROWS_AS(MatsubaraLadder(300.0, TruncationPolicy{1e-9, 5}), std::domain_error);

  MatsubaraLadder ladder(300.0);
  CHECK(ladder.xi(0) == 0.0);
  CHECK(ladder.xi(3) == Approx(3.0 * ladder.xi(1)).epsilon(1e-15));
  CHECK(ladder.xi(1) == Approx(2.0 * constants::pi * constants::k_B_eV_per_K * 300.0).epsilon(1e-15));
  CHECK(MatsubaraLadder::effective_temperature_K(1000.0) == Approx(1144.94).margin(0.01));

  PlatePair bad{plasma(9.0), plasma(9.0), -1.0, 300.0};
  CHECK_THROWS_AS(pressure(bad), std::domain_error);
  PlatePair bad_t{plasma(9.0), plasma(9.0), 100.0, -5.0};
  CHECK_THROWS_AS(pressure(bad_t), std::domain_error);
}

TEST_CASE("hard cap before tolerance raises a convergence error") {
  PlatePair p{plasma(9.0), plasma(9.0), 500.0, 1.0};
  p.truncation.l_max = 10;  // far too few terms at 1 K
  CHECK_THROWS_AS(pressure(p), ConvergenceError);
}

TEST_CASE("tabulated material drives the engine like its analytic source") {
  // dense synthetic absorption table from the Drude profile; the engine sees
  // it through the Kramers-Kronig transform and the zero-frequency
  // classification of the extrapolation tail
  const int rows = 600;
  std::vector<double> omega(rows), im(rows);
  const double lo = std::log(1e-3), hi = std::log(1e3);
  for (int i = 0; i < rows; ++i) {
    const double w = std::exp(lo + (hi - lo) * i / (rows - 1));
    omega[i] = w;
    im[i] = 81.0 * 0.035 / (w * (w * w + 0.035 * 0.035));
  }
  const PermittivityModel tab(
      Tabulated{OpticalTable(std::move(omega), std::move(im)), DrudeTail{9.0, 0.035}});

  PlatePair tab_pair{tab, tab, 700.0, 300.0};
  PlatePair drude_pair{drude(9.0, 0.035), drude(9.0, 0.035), 700.0, 300.0};
  const double p_tab = pressure(tab_pair);
  const double p_drude = pressure(drude_pair);
  CHECK(p_tab == Approx(p_drude).epsilon(1e-3));  // table-resolution limited

  // mixed pair: one tabulated plate, one analytic plate
  PlatePair mixed{tab, drude(9.0, 0.035), 700.0, 300.0};
  CHECK(pressure(mixed) == Approx(p_drude).epsilon(1e-3));
}

TEST_CASE("entropy steps that would cross T = 0 clamp to the ground state") {
  PlatePair p{plasma(9.0), plasma(9.0), 5000.0, 0.4};  // h = 0.5 K > T
  const double s = entropy_per_area(p);
  CHECK(std::isfinite(s));
}
