#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "casimir/constants.hpp"
#include "casimir/errors.hpp"
#include "casimir/quadrature.hpp"

namespace casimir {

// ---------------------------------------------------------------------------
// Oscillator core (bound electrons)
// ---------------------------------------------------------------------------

struct Oscillator {
  double strength_eV2 = 0.0;   // g_j, squared-frequency units
  double frequency_eV = 0.0;   // omega_j > 0
  double damping_eV = 0.0;     // gamma_j >= 0
};

class OscillatorSet {
 public:
  OscillatorSet() = default;
  explicit OscillatorSet(std::vector<Oscillator> oscillators)
      : oscillators_(std::move(oscillators)) {
    for (const auto& o : oscillators_) {
      if (o.strength_eV2 < 0.0) throw std::domain_error("oscillator strength must be >= 0");
      if (!(o.frequency_eV > 0.0)) throw std::domain_error("oscillator frequency must be > 0");
      if (o.damping_eV < 0.0) throw std::domain_error("oscillator damping must be >= 0");
    }
  }

  std::size_t count() const { return oscillators_.size(); }
  const std::vector<Oscillator>& oscillators() const { return oscillators_; }

  // eps_core(omega) on the real axis.
  std::complex<double> eval_real_axis(double omega_eV) const {
    std::complex<double> eps(1.0, 0.0);
    const std::complex<double> i(0.0, 1.0);
    for (const auto& o : oscillators_) {
      eps += o.strength_eV2 /
             (o.frequency_eV * o.frequency_eV - omega_eV * omega_eV - i * o.damping_eV * omega_eV);
    }
    return eps;
  }

  // eps_core(i xi): real, >= 1, monotone non-increasing in xi.
  double eval_imag_axis(double xi_eV) const {
    double eps = 1.0;
    for (const auto& o : oscillators_) {
      eps += o.strength_eV2 / (o.frequency_eV * o.frequency_eV + xi_eV * xi_eV + o.damping_eV * xi_eV);
    }
    return eps;
  }

  double static_value() const {
    double eps = 1.0;
    for (const auto& o : oscillators_) eps += o.strength_eV2 / (o.frequency_eV * o.frequency_eV);
    return eps;
  }

 private:
  std::vector<Oscillator> oscillators_;
};

// ---------------------------------------------------------------------------
// Tabulated optical data
// ---------------------------------------------------------------------------

// Low-frequency continuation of Im eps below the first table row:
// Im eps(w) = omega_p^2 gamma / (w (w^2 + gamma^2)).
struct DrudeTail {
  double omega_p_eV = 0.0;
  double gamma_eV = 0.0;
};

class OpticalTable {
 public:
  OpticalTable(std::vector<double> omega_eV, std::vector<double> im_eps)
      : omega_(std::move(omega_eV)), im_eps_(std::move(im_eps)) {
    if (omega_.size() != im_eps_.size()) throw std::domain_error("optical table: column size mismatch");
    if (omega_.size() < 2) throw std::domain_error("optical table: at least 2 rows required");
    for (std::size_t i = 0; i < omega_.size(); ++i) {
      if (!(omega_[i] > 0.0)) throw std::domain_error("optical table: omega must be > 0");
      if (im_eps_[i] < 0.0) throw std::domain_error("optical table: Im eps must be >= 0 (passivity)");
      if (i > 0 && !(omega_[i] > omega_[i - 1]))
        throw std::domain_error("optical table: omega must be strictly increasing");
    }
  }

  std::size_t rows() const { return omega_.size(); }
  double omega_min() const { return omega_.front(); }
  double omega_max() const { return omega_.back(); }
  const std::vector<double>& omega() const { return omega_; }
  const std::vector<double>& im_eps() const { return im_eps_; }

  bool all_zero() const {
    for (double v : im_eps_)
      if (v > 0.0) return false;
    return true;
  }

 private:
  std::vector<double> omega_;
  std::vector<double> im_eps_;
};

// ---------------------------------------------------------------------------
// Permittivity model variants
// ---------------------------------------------------------------------------

struct CoreOnly {
  OscillatorSet core;
};

// eps_c + 4 pi sigma0 / ... ; the Gaussian-units combination 4 pi sigma0 is
// stored directly in eV.
struct DcConductivity {
  OscillatorSet core;
  double four_pi_sigma0_eV = 0.0;
};

struct Drude {
  OscillatorSet core;
  double omega_p_eV = 0.0;
  double gamma_eV = 0.0;
};

struct Plasma {
  OscillatorSet core;
  double omega_p_eV = 0.0;
};

struct Tabulated {
  OpticalTable table;
  std::optional<DrudeTail> extrapolation;
};

class PermittivityModel {
 public:
  using Variant = std::variant<CoreOnly, DcConductivity, Drude, Plasma, Tabulated>;

  PermittivityModel(CoreOnly m) : v_(std::move(m)) {}
  PermittivityModel(DcConductivity m) : v_(std::move(m)) { validate(); }
  PermittivityModel(Drude m) : v_(std::move(m)) { validate(); }
  PermittivityModel(Plasma m) : v_(std::move(m)) { validate(); }
  PermittivityModel(Tabulated m) : v_(std::move(m)) { validate(); }

  const Variant& variant() const { return v_; }

  template <class T>
  bool is() const {
    return std::holds_alternative<T>(v_);
  }
  template <class T>
  const T& as() const {
    return std::get<T>(v_);
  }

 private:
  void validate() const {
    if (const auto* m = std::get_if<DcConductivity>(&v_)) {
      if (m->four_pi_sigma0_eV < 0.0) throw std::domain_error("4 pi sigma0 must be >= 0");
    } else if (const auto* m = std::get_if<Drude>(&v_)) {
      if (!(m->omega_p_eV > 0.0)) throw std::domain_error("omega_p must be > 0");
      if (m->gamma_eV < 0.0) throw std::domain_error("gamma must be >= 0");
    } else if (const auto* m = std::get_if<Plasma>(&v_)) {
      if (!(m->omega_p_eV > 0.0)) throw std::domain_error("omega_p must be > 0");
    } else if (const auto* m = std::get_if<Tabulated>(&v_)) {
      if (m->extrapolation) {
        if (!(m->extrapolation->omega_p_eV > 0.0)) throw std::domain_error("omega_p must be > 0");
        if (m->extrapolation->gamma_eV < 0.0) throw std::domain_error("gamma must be >= 0");
      }
    }
  }

  Variant v_;
};

// ---------------------------------------------------------------------------
// Zero-frequency behaviour, needed by the l = 0 Matsubara term
// ---------------------------------------------------------------------------

struct ZeroFrequencyLimit {
  enum class Kind { finite, inverse_xi, inverse_xi_squared };
  Kind kind = Kind::finite;
  // eps(0) for `finite`; the divergence coefficient otherwise
  // (eV for 1/xi, eV^2 for 1/xi^2).
  double value = 1.0;
};

// ---------------------------------------------------------------------------
// Kramers-Kronig transform of tabulated data onto the imaginary axis
// ---------------------------------------------------------------------------

namespace detail {

// Closed form of the Drude-tail part of the KK integral:
// wp^2 g * Int_0^a dw / ((w^2+g^2)(w^2+xi^2)).
inline double kk_drude_tail_integral(double a, double xi, double wp, double g) {
  if (g <= 0.0 || a <= 0.0) return 0.0;
  if (std::abs(xi - g) > 1e-8 * std::max(xi, g)) {
    return wp * wp * g / (xi * xi - g * g) *
           (std::atan(a / g) / g - std::atan(a / xi) / xi);
  }
  return wp * wp * g * (a / (2.0 * g * g * (a * a + g * g)) + std::atan(a / g) / (2.0 * g * g * g));
}

}  // namespace detail

// eps(i xi) = 1 + (2/pi) Int_0^inf w Im eps(w) / (w^2 + xi^2) dw, with the
// table integrated by trapezoid on its own grid, the closed-form Drude tail
// below omega_min, and zero weight above omega_max.
inline double kk_to_imag_axis(const OpticalTable& table,
                              const std::optional<DrudeTail>& extrapolation, double xi_eV) {
  if (!(xi_eV > 0.0)) throw std::domain_error("kk_to_imag_axis requires xi > 0");

  // Resolution guard: the integrand w ImEps/(w^2+xi^2) peaks near w ~ xi.
  // When the peak sits inside the tabulated range and carries spectral
  // weight, require at least two rows in [xi/2, 2 xi].
  if (xi_eV >= table.omega_min() && xi_eV <= table.omega_max() && !table.all_zero()) {
    std::size_t in_window = 0;
    for (double w : table.omega()) {
      if (w >= 0.5 * xi_eV && w <= 2.0 * xi_eV) ++in_window;
    }
    if (in_window < 2) {
      throw TableTooSparseError("optical table has fewer than 2 rows around the KK peak at xi = " +
                                std::to_string(xi_eV) + " eV");
    }
  }

  const auto& w = table.omega();
  const auto& im = table.im_eps();
  KahanSum acc;
  double prev_f = w[0] * im[0] / (w[0] * w[0] + xi_eV * xi_eV);
  for (std::size_t i = 1; i < w.size(); ++i) {
    const double f = w[i] * im[i] / (w[i] * w[i] + xi_eV * xi_eV);
    acc.add(0.5 * (f + prev_f) * (w[i] - w[i - 1]));
    prev_f = f;
  }
  double integral = acc.value();
  if (extrapolation) {
    integral += detail::kk_drude_tail_integral(table.omega_min(), xi_eV,
                                               extrapolation->omega_p_eV, extrapolation->gamma_eV);
  }
  return 1.0 + (2.0 / constants::pi) * integral;
}

// ---------------------------------------------------------------------------
// Model evaluation
// ---------------------------------------------------------------------------

inline std::complex<double> eval_real_axis(const PermittivityModel& model, double omega_eV) {
  if (!(omega_eV > 0.0)) throw std::domain_error("eval_real_axis requires omega > 0");
  const std::complex<double> i(0.0, 1.0);
  return std::visit(
      [&](const auto& m) -> std::complex<double> {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, CoreOnly>) {
          return m.core.eval_real_axis(omega_eV);
        } else if constexpr (std::is_same_v<T, DcConductivity>) {
          return m.core.eval_real_axis(omega_eV) + i * (m.four_pi_sigma0_eV / omega_eV);
        } else if constexpr (std::is_same_v<T, Drude>) {
          return m.core.eval_real_axis(omega_eV) -
                 m.omega_p_eV * m.omega_p_eV /
                     (omega_eV * (omega_eV + i * m.gamma_eV));
        } else if constexpr (std::is_same_v<T, Plasma>) {
          return m.core.eval_real_axis(omega_eV) -
                 std::complex<double>(m.omega_p_eV * m.omega_p_eV / (omega_eV * omega_eV), 0.0);
        } else {
          throw std::domain_error("eval_real_axis: tabulated models are defined on the imaginary axis only");
        }
      },
      model.variant());
}

inline double eval_imag_axis(const PermittivityModel& model, double xi_eV) {
  if (!(xi_eV > 0.0)) throw std::domain_error("eval_imag_axis requires xi > 0");
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, CoreOnly>) {
          return m.core.eval_imag_axis(xi_eV);
        } else if constexpr (std::is_same_v<T, DcConductivity>) {
          return m.core.eval_imag_axis(xi_eV) + m.four_pi_sigma0_eV / xi_eV;
        } else if constexpr (std::is_same_v<T, Drude>) {
          return m.core.eval_imag_axis(xi_eV) +
                 m.omega_p_eV * m.omega_p_eV / (xi_eV * (xi_eV + m.gamma_eV));
        } else if constexpr (std::is_same_v<T, Plasma>) {
          return m.core.eval_imag_axis(xi_eV) + m.omega_p_eV * m.omega_p_eV / (xi_eV * xi_eV);
        } else {
          return kk_to_imag_axis(m.table, m.extrapolation, xi_eV);
        }
      },
      model.variant());
}

inline ZeroFrequencyLimit zero_frequency_limit(const PermittivityModel& model) {
  using Kind = ZeroFrequencyLimit::Kind;
  return std::visit(
      [&](const auto& m) -> ZeroFrequencyLimit {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, CoreOnly>) {
          return {Kind::finite, m.core.static_value()};
        } else if constexpr (std::is_same_v<T, DcConductivity>) {
          if (m.four_pi_sigma0_eV == 0.0) return {Kind::finite, m.core.static_value()};
          return {Kind::inverse_xi, m.four_pi_sigma0_eV};
        } else if constexpr (std::is_same_v<T, Drude>) {
          if (m.gamma_eV == 0.0) return {Kind::inverse_xi_squared, m.omega_p_eV * m.omega_p_eV};
          return {Kind::inverse_xi, m.omega_p_eV * m.omega_p_eV / m.gamma_eV};
        } else if constexpr (std::is_same_v<T, Plasma>) {
          return {Kind::inverse_xi_squared, m.omega_p_eV * m.omega_p_eV};
        } else {
          if (m.extrapolation && m.extrapolation->gamma_eV > 0.0) {
            return {Kind::inverse_xi,
                    m.extrapolation->omega_p_eV * m.extrapolation->omega_p_eV / m.extrapolation->gamma_eV};
          }
          if (m.extrapolation) {
            return {Kind::inverse_xi_squared,
                    m.extrapolation->omega_p_eV * m.extrapolation->omega_p_eV};
          }
          // no tail: eps(0) = 1 + (2/pi) Int Im eps(w)/w dw over the table
          const auto& w = m.table.omega();
          const auto& im = m.table.im_eps();
          double integral = 0.0;
          for (std::size_t i = 1; i < w.size(); ++i) {
            integral += 0.5 * (im[i] / w[i] + im[i - 1] / w[i - 1]) * (w[i] - w[i - 1]);
          }
          return {Kind::finite, 1.0 + (2.0 / constants::pi) * integral};
        }
      },
      model.variant());
}

// delta = hbar c / omega_p, in nm.
inline double penetration_depth_nm(double omega_p_eV) {
  if (!(omega_p_eV > 0.0)) throw std::domain_error("penetration_depth requires omega_p > 0");
  return constants::hbar_c_eV_nm / omega_p_eV;
}

}  // namespace casimir
