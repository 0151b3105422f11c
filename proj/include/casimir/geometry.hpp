#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "casimir/constants.hpp"
#include "casimir/errors.hpp"
#include "casimir/lifshitz.hpp"

namespace casimir {

struct SpherePlateGeometry {
  double separation_nm = 0.0;  // shortest sphere-plate distance
  double radius_nm = 0.0;

  double aspect() const { return separation_nm / radius_nm; }

  void validate() const {
    if (!(separation_nm > 0.0)) throw std::domain_error("separation must be > 0");
    if (!(radius_nm > 0.0)) throw std::domain_error("radius must be > 0");
  }
};

// ---------------------------------------------------------------------------
// Proximity force approximation: F(d,T) = 2 pi R F_plates(d,T)
// ---------------------------------------------------------------------------

// free_energy_fn: (d_nm, T_K) -> J/m^2. Result in newtons, exactly linear in R.
inline double pfa_force(const SpherePlateGeometry& g,
                        const std::function<double(double, double)>& free_energy_fn,
                        double temperature_K) {
  g.validate();
  const double radius_m = g.radius_nm * 1e-9;
  return 2.0 * constants::pi * radius_m * free_energy_fn(g.separation_nm, temperature_K);
}

inline double pfa_force(const SpherePlateGeometry& g, const PlatePair& plates) {
  g.validate();
  PlatePair p = plates;
  p.separation_nm = g.separation_nm;
  const double radius_m = g.radius_nm * 1e-9;
  return 2.0 * constants::pi * radius_m * free_energy_per_area(p);
}

// ---------------------------------------------------------------------------
// Ideal-metal sphere-plate results with the first beyond-PFA correction.
// The series is used only for d/R < 0.1; beyond that it is unreliable.
// ---------------------------------------------------------------------------

inline constexpr double ideal_energy_correction_coeff() {
  return 1.0 / 3.0 - 20.0 / (constants::pi * constants::pi);  // -1.6931
}
inline constexpr double ideal_force_correction_coeff() {
  return 1.0 / 6.0 - 10.0 / (constants::pi * constants::pi);  // -0.8465
}

namespace detail {
inline void check_series_domain(const SpherePlateGeometry& g) {
  g.validate();
  if (!(g.aspect() < 0.1)) {
    throw ValidityError("ideal-metal correction series requires d/R < 0.1 (d/R = " +
                        std::to_string(g.aspect()) + ")");
  }
}
}  // namespace detail

// E = -(pi^3 R hbar c / 720 d^2) [1 + (1/3 - 20/pi^2) d/R], in joules.
inline double ideal_energy_corrected(const SpherePlateGeometry& g) {
  using namespace constants;
  detail::check_series_domain(g);
  const double d = g.separation_nm, R = g.radius_nm;
  const double energy_eV = -pi * pi * pi * R * hbar_c_eV_nm / (720.0 * d * d) *
                           (1.0 + ideal_energy_correction_coeff() * g.aspect());
  return energy_eV * elementary_charge_C;
}

// F = -(pi^3 R hbar c / 360 d^3) [1 + (1/6 - 10/pi^2) d/R], in newtons.
inline double ideal_force_corrected(const SpherePlateGeometry& g) {
  using namespace constants;
  detail::check_series_domain(g);
  const double d = g.separation_nm, R = g.radius_nm;
  const double force_eV_per_nm = -pi * pi * pi * R * hbar_c_eV_nm / (360.0 * d * d * d) *
                                 (1.0 + ideal_force_correction_coeff() * g.aspect());
  return force_eV_per_nm * eV_per_nm_in_N;
}

// ---------------------------------------------------------------------------
// Regime classification for the plasma/Drude force ratio q = F_p / F_D
// ---------------------------------------------------------------------------

enum class Regime {
  pfa_valid,                // 0.001 <= d/R <= 0.007, the precision-experiment window
  classical_pfa,            // hbar c/(2 k_B T) << d << R  ->  q = 2
  sphere_small_transition,  // 2 pi c/w_p << R << d        ->  q = 3/2
  sphere_tiny,              // d >> R, d >> hbar c/(2 k_B T), R <= 2 pi c/w_p -> q = 1
  outside_all,
};

inline const char* to_string(Regime r) {
  switch (r) {
    case Regime::pfa_valid: return "PFA-valid";
    case Regime::classical_pfa: return "classical-PFA";
    case Regime::sphere_small_transition: return "sphere-small-transition";
    case Regime::sphere_tiny: return "sphere-tiny";
    case Regime::outside_all: return "outside-all";
  }
  return "?";
}

struct RegimeCondition {
  std::string text;
  bool holds = false;
};

struct RegimeReport {
  Regime label = Regime::outside_all;
  std::optional<double> expected_q;
  std::vector<RegimeCondition> conditions;
};

// Asymptotic "<<" statements are made testable by a strictness factor:
// a << b is taken as strictness * a <= b. The experiment window bounds are
// checked verbatim.
inline RegimeReport classify_regime(const SpherePlateGeometry& g, double temperature_K,
                                    double omega_p_eV, double strictness = 10.0) {
  g.validate();
  if (!(temperature_K > 0.0)) throw std::domain_error("temperature must be > 0");
  if (!(omega_p_eV > 0.0)) throw std::domain_error("omega_p must be > 0");
  if (!(strictness >= 1.0)) throw std::domain_error("strictness factor must be >= 1");

  const double d = g.separation_nm, R = g.radius_nm;
  const double thermal_length_nm =
      constants::hbar_c_eV_nm / (2.0 * constants::k_B_eV_per_K * temperature_K);
  const double plasma_wavelength_nm = 2.0 * constants::pi * constants::hbar_c_eV_nm / omega_p_eV;

  const bool window_lo = g.aspect() >= 0.001;
  const bool window_hi = g.aspect() <= 0.007;
  const bool d_classical = d >= strictness * thermal_length_nm;
  const bool d_below_R = strictness * d <= R;
  const bool R_above_plasma = R >= strictness * plasma_wavelength_nm;
  const bool R_below_d = strictness * R <= d;
  const bool R_small = R <= plasma_wavelength_nm;

  RegimeReport report;
  report.conditions = {
      {"0.001 <= d/R", window_lo},
      {"d/R <= 0.007", window_hi},
      {"hbar c/(2 k_B T) << d", d_classical},
      {"d << R", d_below_R},
      {"2 pi c/omega_p << R", R_above_plasma},
      {"R << d", R_below_d},
      {"R <= 2 pi c/omega_p", R_small},
  };

  if (window_lo && window_hi) {
    report.label = Regime::pfa_valid;
  } else if (d_classical && d_below_R) {
    report.label = Regime::classical_pfa;
    report.expected_q = 2.0;
  } else if (R_above_plasma && R_below_d) {
    report.label = Regime::sphere_small_transition;
    report.expected_q = 1.5;
  } else if (R_below_d && d_classical && R_small) {
    report.label = Regime::sphere_tiny;
    report.expected_q = 1.0;
  } else {
    report.label = Regime::outside_all;
  }
  return report;
}

// q = F_plasma / F_Drude through the PFA with the simple models (eps_c = 1).
// The sphere radius cancels but the forces are formed through pfa_force.
inline double q_ratio(double separation_nm, double temperature_K, double omega_p_eV,
                      double gamma_eV, TruncationPolicy truncation = {},
                      QuadraturePolicy quadrature = {}) {
  const SpherePlateGeometry g{separation_nm, 1e9};
  PlatePair plasma{PermittivityModel(Plasma{OscillatorSet{}, omega_p_eV}),
                   PermittivityModel(Plasma{OscillatorSet{}, omega_p_eV}),
                   separation_nm,
                   temperature_K,
                   truncation,
                   quadrature};
  PlatePair drude{PermittivityModel(Drude{OscillatorSet{}, omega_p_eV, gamma_eV}),
                  PermittivityModel(Drude{OscillatorSet{}, omega_p_eV, gamma_eV}),
                  separation_nm,
                  temperature_K,
                  truncation,
                  quadrature};
  return pfa_force(g, plasma) / pfa_force(g, drude);
}

}  // namespace casimir
