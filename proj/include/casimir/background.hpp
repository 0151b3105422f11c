#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>

#include "casimir/constants.hpp"
#include "casimir/measurement.hpp"

namespace casimir {

// Electrostatic patch background and the total-force decomposition used when
// comparing lens-type force measurements with theory. SI units (volts,
// newtons, meters) with separations passed in nm like the rest of the
// library.

struct PatchParams {
  double v_rms_V = 0.0;   // rms patch voltage, >= 0
  double offset_N = 0.0;  // electronics offset "a"; unconstrained sign
  double radius_m = 0.0;

  void validate() const {
    if (v_rms_V < 0.0) throw std::domain_error("V_rms must be >= 0");
    if (!(radius_m > 0.0)) throw std::domain_error("radius must be > 0");
  }
};

// F_patch = -pi eps0 R V_rms^2 / d  (attractive, 1/d).
inline double patch_force(double radius_m, double v_rms_V, double d_nm) {
  if (!(d_nm > 0.0)) throw std::domain_error("separation must be > 0");
  if (!(radius_m > 0.0)) throw std::domain_error("radius must be > 0");
  const double d_m = d_nm * 1e-9;
  return -constants::pi * constants::epsilon0_F_per_m * radius_m * v_rms_V * v_rms_V / d_m;
}

// Size window d << lambda << sqrt(R d) for the patch-force model, with "<<"
// as a configurable strictness factor.
struct PatchSizeCheck {
  bool valid = false;
  double lower_nm = 0.0;  // strictness * d
  double upper_nm = 0.0;  // sqrt(R d) / strictness
};

inline PatchSizeCheck patch_size_valid(double lambda_nm, double d_nm, double radius_m,
                                       double strictness = 10.0) {
  if (!(lambda_nm > 0.0) || !(d_nm > 0.0) || !(radius_m > 0.0))
    throw std::domain_error("patch_size_valid requires positive inputs");
  if (!(strictness >= 1.0)) throw std::domain_error("strictness factor must be >= 1");
  PatchSizeCheck check;
  const double radius_nm = radius_m * 1e9;
  check.lower_nm = strictness * d_nm;
  check.upper_nm = std::sqrt(radius_nm * d_nm) / strictness;
  check.valid = lambda_nm >= check.lower_nm && lambda_nm <= check.upper_nm;
  return check;
}

// F_tot(d) = F(d) - pi eps0 R V_rms^2 / d - a.
inline double total_force(const std::function<double(double)>& casimir_force_N,
                          const PatchParams& params, double d_nm) {
  params.validate();
  if (!(d_nm > 0.0)) throw std::domain_error("separation must be > 0");
  return casimir_force_N(d_nm) + patch_force(params.radius_m, params.v_rms_V, d_nm) -
         params.offset_N;
}

// Pointwise |measured - theory| with the measurement sigma carried through.
// Accepts a single point, unlike the fitting entry points.
inline ResidualSeries residual_signal(const MeasurementSet& data,
                                      const std::function<double(double)>& theory_fn) {
  for (const auto& p : data.points) {
    if (!(p.sigma_value > 0.0)) throw std::domain_error("measurement sigma must be > 0");
  }
  ResidualSeries series;
  series.points.reserve(data.points.size());
  for (const auto& p : data.points) {
    series.points.push_back({p.d_nm, std::abs(p.value - theory_fn(p.d_nm)), p.sigma_value});
  }
  return series;
}

}  // namespace casimir
