#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "casimir/constants.hpp"
#include "casimir/geometry.hpp"

using namespace casimir;
using Catch::Approx;

namespace {

double ideal_energy_Jm2(double d_nm) {
  using namespace constants;
  return -pi * pi * hbar_c_eV_nm / (720.0 * d_nm * d_nm * d_nm) * eV_per_nm2_in_J_per_m2;
}

}  // namespace

TEST_CASE("beyond-PFA correction coefficients") {
  CHECK(ideal_energy_correction_coeff() == Approx(-1.6931).margin(1e-4));
  CHECK(ideal_force_correction_coeff() == Approx(-0.8465).margin(1e-4));
  CHECK(ideal_energy_correction_coeff() == Approx(-1.6930903395134).epsilon(1e-12));
  CHECK(ideal_force_correction_coeff() == Approx(-0.8465451697567).epsilon(1e-12));
}

TEST_CASE("PFA force") {
  const SpherePlateGeometry g{1000.0, 150e3};  // d = 1 um, R = 150 um
  auto ideal_fn = [](double d, double) { return ideal_energy_Jm2(d); };

  SECTION("ideal-metal T = 0 value") {
    const double f = pfa_force(g, ideal_fn, 0.0);
    CHECK(f == Approx(-4.0844655767e-13).epsilon(1e-8));
    // identical to -pi^3 hbar c R / (360 d^3)
    using namespace constants;
    const double closed = -pi * pi * pi * g.radius_nm * hbar_c_eV_nm /
                          (360.0 * 1e9) * eV_per_nm_in_N;
    CHECK(f == Approx(closed).epsilon(1e-12));
  }

  SECTION("exactly linear in R") {
    for (double c : {0.5, 2.0, 7.0}) {
      SpherePlateGeometry scaled{g.separation_nm, c * g.radius_nm};
      CHECK(pfa_force(scaled, ideal_fn, 0.0) ==
            Approx(c * pfa_force(g, ideal_fn, 0.0)).epsilon(1e-14));
    }
  }

  SECTION("engine overload is 2 pi R times the plate free energy") {
    const PermittivityModel gold(Plasma{OscillatorSet{}, 9.0});
    PlatePair pair{gold, gold, 700.0, 300.0};
    const SpherePlateGeometry gg{700.0, 151.2e3};
    const double direct = 2.0 * constants::pi * gg.radius_nm * 1e-9 * free_energy_per_area(pair);
    CHECK(pfa_force(gg, pair) == Approx(direct).epsilon(1e-12));
  }

  SECTION("geometry validation") {
    CHECK_THROWS_AS(pfa_force(SpherePlateGeometry{0.0, 1.0}, ideal_fn, 0.0), std::domain_error);
    CHECK_THROWS_AS(pfa_force(SpherePlateGeometry{1.0, -1.0}, ideal_fn, 0.0), std::domain_error);
  }
}

TEST_CASE("ideal-metal corrected energy and force") {
  SECTION("correction factor at the d/R = 0.007 window edge") {
    const double d = 1000.0;
    const SpherePlateGeometry g{d, d / 0.007};
    const double uncorrected = -std::pow(constants::pi, 3) * g.radius_nm *
                               constants::hbar_c_eV_nm / (720.0 * d * d) *
                               constants::elementary_charge_C;
    CHECK(ideal_energy_corrected(g) / uncorrected ==
          Approx(1.0 - 1.6930903395134 * 0.007).epsilon(1e-10));
    CHECK(ideal_energy_corrected(g) / uncorrected == Approx(0.98815).margin(2e-5));
  }

  SECTION("ratio to PFA tends to one as d/R -> 0") {
    const SpherePlateGeometry g{1000.0, 1e8};  // d/R = 1e-5
    const double ratio = ideal_force_corrected(g) /
                         (2.0 * constants::pi * g.radius_nm * 1e-9 * ideal_energy_Jm2(1000.0));
    CHECK(ratio == Approx(1.0).margin(2e-5));
  }

  SECTION("PFA relative error at d/R = 0.007 is 0.59%") {
    const SpherePlateGeometry g{1000.0, 1000.0 / 0.007};
    const double pfa = 2.0 * constants::pi * g.radius_nm * 1e-9 * ideal_energy_Jm2(1000.0);
    CHECK(std::abs(ideal_force_corrected(g) / pfa - 1.0) == Approx(0.0059258).margin(1e-5));
  }

  SECTION("force is consistent with -dE/dd") {
    const SpherePlateGeometry g{1000.0, 1e6};
    const double h = 1.0;
    const double de = (ideal_energy_corrected({g.separation_nm + h, g.radius_nm}) -
                       ideal_energy_corrected({g.separation_nm - h, g.radius_nm})) /
                      (2.0 * h);
    const double f_fd = -de * 1e9;  // J per nm -> N
    CHECK(ideal_force_corrected(g) == Approx(f_fd).epsilon(1e-5));
  }

  SECTION("slope of the ratio recovers the force coefficient within 1%") {
    // least-squares line through (x, F_corr/F_pfa) for x = d/R in [1e-4, 1e-2]
    std::vector<double> xs, ys;
    for (int i = 0; i < 12; ++i) {
      const double x = std::pow(10.0, -4.0 + 2.0 * i / 11.0);
      const SpherePlateGeometry g{500.0, 500.0 / x};
      const double pfa = 2.0 * constants::pi * g.radius_nm * 1e-9 * ideal_energy_Jm2(500.0);
      xs.push_back(x);
      ys.push_back(ideal_force_corrected(g) / pfa);
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sx += xs[i]; sy += ys[i]; sxx += xs[i] * xs[i]; sxy += xs[i] * ys[i];
    }
    const double n = static_cast<double>(xs.size());
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(slope == Approx(ideal_force_correction_coeff()).epsilon(0.01));
  }

  SECTION("series guard") {
    CHECK_THROWS_AS(ideal_energy_corrected({100.0, 1000.0}), ValidityError);
    CHECK_THROWS_AS(ideal_force_corrected({100.0, 999.0}), ValidityError);
    CHECK_NOTHROW(ideal_force_corrected({100.0, 1001.0}));
  }
}

TEST_CASE("regime classification") {
  SECTION("experiment window wins") {
    for (double aspect : {0.001, 0.004, 0.007}) {
      const auto rep = classify_regime({600.0, 600.0 / aspect}, 300.0, 9.0);
      CHECK(rep.label == Regime::pfa_valid);
      CHECK_FALSE(rep.expected_q.has_value());
    }
  }
  SECTION("classical PFA regime, q = 2") {
    // d = 100 um >> 10 * thermal length (3.8 um), R = 1 m >> 10 d
    const auto rep = classify_regime({1e5, 1e9}, 300.0, 9.0);
    CHECK(rep.label == Regime::classical_pfa);
    REQUIRE(rep.expected_q.has_value());
    CHECK(*rep.expected_q == 2.0);
  }
  SECTION("sphere small against separation, q = 3/2") {
    // lambda_p(9 eV) = 137.8 nm; R = 2 um >= 10 lambda_p; d = 50 um >= 10 R
    const auto rep = classify_regime({5e4, 2e3}, 300.0, 9.0);
    CHECK(rep.label == Regime::sphere_small_transition);
    REQUIRE(rep.expected_q.has_value());
    CHECK(*rep.expected_q == 1.5);
  }
  SECTION("tiny sphere, q = 1") {
    const auto rep = classify_regime({5e4, 100.0}, 300.0, 9.0);
    CHECK(rep.label == Regime::sphere_tiny);
    REQUIRE(rep.expected_q.has_value());
    CHECK(*rep.expected_q == 1.0);
  }
  SECTION("no asymptotic label outside every region") {
    const auto rep = classify_regime({1000.0, 10000.0}, 300.0, 9.0);
    CHECK(rep.label == Regime::outside_all);
    CHECK_FALSE(rep.expected_q.has_value());
  }
  SECTION("q = 3/2 never fires with d < R") {
    for (double d : {100.0, 1000.0, 5e4, 1e6}) {
      for (double R : {50.0, 2e3, 1e5, 1e7, 1e9}) {
        const auto rep = classify_regime({d, R}, 300.0, 9.0);
        if (rep.label == Regime::sphere_small_transition) CHECK(d >= R);
      }
    }
  }
  SECTION("conditions are reported") {
    const auto rep = classify_regime({600.0, 150e3}, 300.0, 9.0);
    CHECK(rep.conditions.size() >= 5);
  }
}

TEST_CASE("q ratio from the full engine through the PFA") {
  // classical regime: within 10% of 2 at d = 10 um, 300 K, gold parameters
  const double q_classical = q_ratio(10000.0, 300.0, 9.0, 0.035);
  CHECK(q_classical == Approx(2.0).epsilon(0.10));
  CHECK(q_classical > 1.8);
  CHECK(q_classical < 2.0);

  // free-energy (= PFA force) ratio at 700 nm; regression against the
  // independent reference stack
  const double q_700 = q_ratio(700.0, 300.0, 9.0, 0.035);
  CHECK(q_700 == Approx(1.1961172).epsilon(5e-4));
}
