#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "casimir/constants.hpp"
#include "casimir/errors.hpp"

namespace casimir {

// Closed-form large-separation pressure expansions for the simple (eps_c = 1)
// plasma and Drude models, quadratic in the penetration depth delta = c/w_p.
// They serve both as fast theory functions for fitting and as cross-checks of
// the full engine.

struct ExpansionInput {
  double separation_nm = 0.0;
  double penetration_depth_nm = 0.0;
  double temperature_K = 0.0;
};

namespace detail {

inline void check_expansion_domain(double d_nm, double delta_nm) {
  if (!(d_nm > 0.0)) throw std::domain_error("separation must be > 0");
  if (delta_nm < 0.0) throw std::domain_error("penetration depth must be >= 0");
  if (!(delta_nm < d_nm / 3.0)) {
    throw ValidityError("expansion requires delta < d/3 (delta = " + std::to_string(delta_nm) +
                        " nm, d = " + std::to_string(d_nm) + " nm)");
  }
}

}  // namespace detail

// P = -(pi^2 hbar c / 240 d^4) (1 - (16/3)(delta/d) + 24 (delta/d)^2), in Pa.
inline double plasma_pressure(double d_nm, double delta_nm) {
  using namespace constants;
  detail::check_expansion_domain(d_nm, delta_nm);
  const double x = delta_nm / d_nm;
  const double base = -pi * pi * hbar_c_eV_nm / (240.0 * d_nm * d_nm * d_nm * d_nm);
  return base * (1.0 - (16.0 / 3.0) * x + 24.0 * x * x) * eV_per_nm3_in_Pa;
}

// Adds the thermal term +(k_B T zeta(3) / 8 pi d^3)(1 - 6 delta/d + 24 (delta/d)^2);
// reduces to plasma_pressure exactly at T = 0.
inline double drude_pressure(double d_nm, double delta_nm, double temperature_K) {
  using namespace constants;
  detail::check_expansion_domain(d_nm, delta_nm);
  if (temperature_K < 0.0) throw std::domain_error("temperature must be >= 0");
  const double x = delta_nm / d_nm;
  const double thermal = k_B_eV_per_K * temperature_K * zeta3 /
                         (8.0 * pi * d_nm * d_nm * d_nm) *
                         (1.0 - 6.0 * x + 24.0 * x * x) * eV_per_nm3_in_Pa;
  return plasma_pressure(d_nm, delta_nm) + thermal;
}

inline double plasma_pressure(const ExpansionInput& in) {
  return plasma_pressure(in.separation_nm, in.penetration_depth_nm);
}
inline double drude_pressure(const ExpansionInput& in) {
  return drude_pressure(in.separation_nm, in.penetration_depth_nm, in.temperature_K);
}

}  // namespace casimir
