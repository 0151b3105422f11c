#pragma once

#include <algorithm>
#include <cmath>
#include <future>
#include <string>
#include <vector>

#include "casimir/constants.hpp"
#include "casimir/dielectric.hpp"
#include "casimir/errors.hpp"
#include "casimir/quadrature.hpp"

namespace casimir {

// ---------------------------------------------------------------------------
// Policies and geometry
// ---------------------------------------------------------------------------

struct TruncationPolicy {
  double rel_tol = 1e-9;  // in (0, 1e-3]
  int l_max = 100000;     // >= 10

  void validate() const {
    if (!(rel_tol > 0.0) || rel_tol > 1e-3)
      throw std::domain_error("truncation tolerance must lie in (0, 1e-3]");
    if (l_max < 10) throw std::domain_error("truncation l_max must be >= 10");
  }
};

struct QuadraturePolicy {
  double rel_tol = 1e-8;  // per-term transverse-momentum integral
};

// Temperature-indexed imaginary frequencies xi_l = 2 pi k_B T l.
class MatsubaraLadder {
 public:
  MatsubaraLadder(double temperature_K, TruncationPolicy truncation = {})
      : temperature_K_(temperature_K), truncation_(truncation) {
    if (temperature_K_ < 0.0) throw std::domain_error("temperature must be >= 0");
    truncation_.validate();
  }

  double temperature_K() const { return temperature_K_; }
  const TruncationPolicy& truncation() const { return truncation_; }

  double xi(int l) const {
    return 2.0 * constants::pi * constants::k_B_eV_per_K * temperature_K_ * l;
  }

  // T_eff = hbar c / (2 d k_B); the classical regime is T >> T_eff.
  static double effective_temperature_K(double separation_nm) {
    return constants::hbar_c_eV_nm / (2.0 * separation_nm * constants::k_B_eV_per_K);
  }

 private:
  double temperature_K_;
  TruncationPolicy truncation_;
};

struct PlatePair {
  PermittivityModel material_1;
  PermittivityModel material_2;
  double separation_nm = 0.0;
  double temperature_K = 0.0;  // T = 0 selects the continuous-frequency integral
  TruncationPolicy truncation{};
  QuadraturePolicy quadrature{};
  int threads = 1;
};

namespace detail {

inline void validate(const PlatePair& p) {
  if (!(p.separation_nm > 0.0)) throw std::domain_error("plate separation must be > 0");
  if (p.temperature_K < 0.0) throw std::domain_error("temperature must be >= 0");
  p.truncation.validate();
  if (!(p.quadrature.rel_tol > 0.0)) throw std::domain_error("quadrature tolerance must be > 0");
  if (p.threads < 1) throw std::domain_error("thread count must be >= 1");
}

// ---------------------------------------------------------------------------
// Reflection-coefficient integrands, in the substituted variable y = 2 q d.
// With rho_i = sqrt(y^2 + (eps_i - 1) yl^2):
//   r_TM = (eps y - rho)/(eps y + rho),  r_TE = (y - rho)/(y + rho).
// ---------------------------------------------------------------------------

enum class Kind { energy, pressure };

// 1 - R e^{-y} without cancellation when R -> 1 and y -> 0.
inline double one_minus_r_exp(double r_prod, double y) {
  return (1.0 - r_prod) + r_prod * (-std::expm1(-y));
}

template <Kind K>
inline double term_integrand(double y, double yl, double e1, double e2) {
  const double rho1 = std::sqrt(y * y + (e1 - 1.0) * yl * yl);
  const double rho2 = std::sqrt(y * y + (e2 - 1.0) * yl * yl);
  const double rtm = ((e1 * y - rho1) / (e1 * y + rho1)) * ((e2 * y - rho2) / (e2 * y + rho2));
  const double rte = ((y - rho1) / (y + rho1)) * ((y - rho2) / (y + rho2));
  const double ey = std::exp(-y);
  if constexpr (K == Kind::pressure) {
    return y * y *
           (rtm * ey / one_minus_r_exp(rtm, y) + rte * ey / one_minus_r_exp(rte, y));
  } else {
    return y * (std::log1p(-rtm * ey) + std::log1p(-rte * ey));
  }
}

// Zero-frequency (l = 0) reflection data, decided by the divergence
// classification rather than by evaluating eps at tiny xi.
struct ZeroMode {
  double r_tm = 0.0;
  bool te_active = false;
  double te_b = 0.0;  // additive y^2 offset: C (2d/hbar c)^2
};

inline ZeroMode zero_mode(const ZeroFrequencyLimit& zf, double d_nm) {
  using Kind = ZeroFrequencyLimit::Kind;
  ZeroMode zm;
  switch (zf.kind) {
    case Kind::finite:
      zm.r_tm = (zf.value - 1.0) / (zf.value + 1.0);
      break;
    case Kind::inverse_xi:
      zm.r_tm = 1.0;
      break;
    case Kind::inverse_xi_squared: {
      zm.r_tm = 1.0;
      zm.te_active = true;
      const double s = 2.0 * d_nm / constants::hbar_c_eV_nm;
      zm.te_b = zf.value * s * s;
      break;
    }
  }
  return zm;
}

template <Kind K>
inline double l0_integrand(double y, const ZeroMode& a, const ZeroMode& b) {
  const double rtm = a.r_tm * b.r_tm;
  double rte = 0.0;
  if (a.te_active && b.te_active) {
    const double sa = std::sqrt(y * y + a.te_b);
    const double sb = std::sqrt(y * y + b.te_b);
    rte = ((y - sa) / (y + sa)) * ((y - sb) / (y + sb));
  }
  const double ey = std::exp(-y);
  if constexpr (K == Kind::pressure) {
    double v = rtm * ey / one_minus_r_exp(rtm, y) * y * y;
    if (rte != 0.0) v += rte * ey / one_minus_r_exp(rte, y) * y * y;
    return v;
  } else {
    double v = y * std::log1p(-rtm * ey);
    if (rte != 0.0) v += y * std::log1p(-rte * ey);
    return v;
  }
}

// e^{u}-scaled integrand for the T = 0 Gauss-Laguerre path, evaluated at
// y = u + t. For y > 35 the log/fraction is linearized so e^{u} never has to
// be formed against an underflowing e^{-y}.
template <Kind K>
inline double scaled_integrand(double u, double t, double e1, double e2) {
  const double y = u + t;
  const double rho1 = std::sqrt(y * y + (e1 - 1.0) * u * u);
  const double rho2 = std::sqrt(y * y + (e2 - 1.0) * u * u);
  const double rtm = ((e1 * y - rho1) / (e1 * y + rho1)) * ((e2 * y - rho2) / (e2 * y + rho2));
  const double rte = ((y - rho1) / (y + rho1)) * ((y - rho2) / (y + rho2));
  if (y > 35.0) {
    const double et = std::exp(-t);
    if constexpr (K == Kind::pressure) {
      return y * y * et * (rtm + rte);
    } else {
      return -y * et * (rtm + rte);
    }
  }
  const double eu = std::exp(u);
  const double ey = std::exp(-y);
  if constexpr (K == Kind::pressure) {
    return eu * y * y *
           (rtm * ey / one_minus_r_exp(rtm, y) + rte * ey / one_minus_r_exp(rte, y));
  } else {
    return eu * y * (std::log1p(-rtm * ey) + std::log1p(-rte * ey));
  }
}

// ---------------------------------------------------------------------------
// Matsubara summation (T > 0) with Euler-Maclaurin integral tail
// ---------------------------------------------------------------------------

template <Kind K>
double term_at(const PlatePair& p, double yl) {
  const double xi = yl * constants::hbar_c_eV_nm / (2.0 * p.separation_nm);
  const double e1 = eval_imag_axis(p.material_1, xi);
  const double e2 = eval_imag_axis(p.material_2, xi);
  return quad::integrate_adaptive([&](double y) { return term_integrand<K>(y, yl, e1, e2); }, yl,
                                  yl + 40.0, p.quadrature.rel_tol);
}

// Sum' over l (l = 0 at half weight) of the per-frequency integrals.
template <Kind K>
double matsubara_sum(const PlatePair& p) {
  const double dy = 4.0 * constants::pi * constants::k_B_eV_per_K * p.temperature_K *
                    p.separation_nm / constants::hbar_c_eV_nm;
  const ZeroMode zm1 = zero_mode(zero_frequency_limit(p.material_1), p.separation_nm);
  const ZeroMode zm2 = zero_mode(zero_frequency_limit(p.material_2), p.separation_nm);

  KahanSum acc;
  acc.add(0.5 * quad::integrate_adaptive(
                    [&](double y) { return l0_integrand<K>(y, zm1, zm2); }, 0.0, 60.0,
                    p.quadrature.rel_tol));

  // Remaining-tail bound for a geometric decay with ratio e^{-dy}; terms grow
  // only polynomially against that, covered by the factor 2.
  const double tail_factor = 1.0 + 2.0 / std::expm1(std::min(dy, 700.0));
  const double tol = p.truncation.rel_tol;

  double t_prev = 0.0, t_last = 0.0;
  int consecutive = 0;
  int l_stop = 0;
  const int block = (p.threads > 1) ? 64 : 1;
  std::vector<double> terms(block);

  for (int l0 = 1; l0 <= p.truncation.l_max && l_stop == 0; l0 += block) {
    const int n = std::min(block, p.truncation.l_max - l0 + 1);
    if (p.threads > 1 && n > 1) {
      const int workers = std::min(p.threads, n);
      std::vector<std::future<void>> futures;
      futures.reserve(workers);
      for (int w = 0; w < workers; ++w) {
        futures.push_back(std::async(std::launch::async, [&, w] {
          for (int k = w; k < n; k += workers) terms[k] = term_at<K>(p, dy * (l0 + k));
        }));
      }
      for (auto& f : futures) f.get();
    } else {
      for (int k = 0; k < n; ++k) terms[k] = term_at<K>(p, dy * (l0 + k));
    }
    for (int k = 0; k < n; ++k) {
      t_prev = t_last;
      t_last = terms[k];
      acc.add(t_last);
      if (std::abs(t_last) * tail_factor <= tol * std::abs(acc.value())) {
        if (++consecutive >= 2) {
          l_stop = l0 + k;
          break;
        }
      } else {
        consecutive = 0;
      }
    }
  }
  if (l_stop == 0) {
    throw ConvergenceError("Matsubara sum did not reach the truncation tolerance before l_max = " +
                           std::to_string(p.truncation.l_max));
  }

  // At fine ladder spacing the truncated tail still matters; replace it by
  // its midpoint integral plus the first Euler-Maclaurin correction.
  if (dy < 1.0) {
    const double yc = dy * (l_stop + 0.5);
    const double tail_integral = quad::integrate_adaptive(
        [&](double y) { return term_at<K>(p, y); }, yc, yc + 40.0, p.quadrature.rel_tol);
    acc.add(tail_integral / dy);
    acc.add((t_last - t_prev) / 24.0);
  }
  return acc.value();
}

// ---------------------------------------------------------------------------
// T = 0 continuous-frequency integral
// ---------------------------------------------------------------------------

inline const quad::GaussRule& laguerre_cached(int n) {
  static const quad::GaussRule r64 = quad::laguerre_rule(64);
  static const quad::GaussRule r128 = quad::laguerre_rule(128);
  static const quad::GaussRule r256 = quad::laguerre_rule(256);
  if (n == 64) return r64;
  if (n == 128) return r128;
  return r256;
}

template <Kind K>
double t0_integral(const PlatePair& p) {
  const double d = p.separation_nm;
  auto g = [&](double u) {
    const double xi = u * constants::hbar_c_eV_nm / (2.0 * d);
    const double e1 = eval_imag_axis(p.material_1, xi);
    const double e2 = eval_imag_axis(p.material_2, xi);
    return quad::integrate_adaptive(
        [&](double t) { return scaled_integrand<K>(u, t, e1, e2); }, 0.0, 40.0,
        p.quadrature.rel_tol);
  };

  double previous = 0.0;
  bool have_previous = false;
  for (int n : {64, 128, 256}) {
    const auto& rule = laguerre_cached(n);
    KahanSum acc;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      if (rule.weights[i] == 0.0) continue;
      acc.add(rule.weights[i] * g(rule.nodes[i]));
    }
    const double value = acc.value();
    if (have_previous && std::abs(value - previous) <= 1e-8 * std::abs(value)) return value;
    previous = value;
    have_previous = true;
  }

  // Node doubling stalls when eps(i xi) varies on a scale comparable to the
  // lowest Laguerre nodes (e.g. Drude with xi ~ gamma). Adaptive panels over
  // the unscaled integrand are robust there.
  auto unscaled = [&](double u) { return term_at<K>(p, u); };
  return quad::integrate_adaptive(unscaled, 0.0, 45.0, std::max(p.quadrature.rel_tol, 1e-10));
}

template <Kind K>
double reduced_sum(const PlatePair& p) {
  validate(p);
  return (p.temperature_K == 0.0) ? t0_integral<K>(p) : matsubara_sum<K>(p);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Public interface
// ---------------------------------------------------------------------------

// Free energy per unit area, J/m^2 (negative = attractive).
inline double free_energy_per_area(const PlatePair& p) {
  using namespace constants;
  const double d = p.separation_nm;
  const double s = detail::reduced_sum<detail::Kind::energy>(p);
  double value_eV_nm2;
  if (p.temperature_K == 0.0) {
    value_eV_nm2 = hbar_c_eV_nm / (32.0 * pi * pi * d * d * d) * s;
  } else {
    value_eV_nm2 = k_B_eV_per_K * p.temperature_K / (8.0 * pi * d * d) * s;
  }
  return value_eV_nm2 * eV_per_nm2_in_J_per_m2;
}

// Casimir pressure between the plates, Pa (negative = attraction).
inline double pressure(const PlatePair& p) {
  using namespace constants;
  const double d = p.separation_nm;
  const double s = detail::reduced_sum<detail::Kind::pressure>(p);
  double value_eV_nm3;
  if (p.temperature_K == 0.0) {
    value_eV_nm3 = -hbar_c_eV_nm / (32.0 * pi * pi * d * d * d * d) * s;
  } else {
    value_eV_nm3 = -k_B_eV_per_K * p.temperature_K / (8.0 * pi * d * d * d) * s;
  }
  return value_eV_nm3 * eV_per_nm3_in_Pa;
}

// The l = 0 Matsubara contribution to the pressure, Pa.
inline double classical_term(const PlatePair& p) {
  using namespace constants;
  detail::validate(p);
  if (!(p.temperature_K > 0.0)) throw std::domain_error("classical_term requires T > 0");
  const double d = p.separation_nm;
  const auto zm1 = detail::zero_mode(zero_frequency_limit(p.material_1), d);
  const auto zm2 = detail::zero_mode(zero_frequency_limit(p.material_2), d);
  const double i0 = quad::integrate_adaptive(
      [&](double y) { return detail::l0_integrand<detail::Kind::pressure>(y, zm1, zm2); }, 0.0,
      60.0, p.quadrature.rel_tol);
  return -k_B_eV_per_K * p.temperature_K / (8.0 * pi * d * d * d) * 0.5 * i0 * eV_per_nm3_in_Pa;
}

// S = -dF/dT by central difference with step max(0.01 T, 0.5 K), J/(m^2 K).
// The difference resolves a tiny fraction of F at low temperature, so the
// engine runs with tightened tolerances here.
inline double entropy_per_area(const PlatePair& p) {
  detail::validate(p);
  if (!(p.temperature_K > 0.0)) throw std::domain_error("entropy_per_area requires T > 0");
  const double h = std::max(0.01 * p.temperature_K, 0.5);
  PlatePair tight = p;
  tight.truncation.rel_tol = std::min(p.truncation.rel_tol, 1e-11);
  tight.quadrature.rel_tol = std::min(p.quadrature.rel_tol, 1e-11);

  PlatePair hi = tight;
  hi.temperature_K = p.temperature_K + h;
  PlatePair lo = tight;
  lo.temperature_K = std::max(p.temperature_K - h, 0.0);
  const double f_hi = free_energy_per_area(hi);
  const double f_lo = free_energy_per_area(lo);
  return -(f_hi - f_lo) / (hi.temperature_K - lo.temperature_K);
}

}  // namespace casimir
