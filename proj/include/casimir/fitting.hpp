#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "casimir/asymptotics.hpp"
#include "casimir/background.hpp"
#include "casimir/errors.hpp"
#include "casimir/geometry.hpp"
#include "casimir/lifshitz.hpp"
#include "casimir/measurement.hpp"
#include "casimir/quadrature.hpp"
#include "casimir/rng.hpp"

namespace casimir {

// ---------------------------------------------------------------------------
// chi^2 survival probability: P(chi^2 > chi2_min) = Q(f/2, chi2_min/2)
// ---------------------------------------------------------------------------

namespace detail {

inline double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 0; n < 1000; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-16) {
      return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
  }
  throw ConvergenceError("incomplete gamma series did not converge");
}

inline double gamma_q_continued_fraction(double a, double x) {
  constexpr double kTiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 1000; ++i) {
    const double an = -static_cast<double>(i) * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) {
      return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
    }
  }
  throw ConvergenceError("incomplete gamma continued fraction did not converge");
}

}  // namespace detail

inline double chi2_survival(double chi2, int dof) {
  if (chi2 < 0.0) throw std::domain_error("chi2 must be >= 0");
  if (dof < 1) throw std::domain_error("degrees of freedom must be >= 1");
  const double a = 0.5 * dof;
  const double x = 0.5 * chi2;
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - detail::gamma_p_series(a, x);
  return detail::gamma_q_continued_fraction(a, x);
}

// ---------------------------------------------------------------------------
// Fit specification
// ---------------------------------------------------------------------------

enum class TheoryFamily {
  plasma_asymptotic,   // pressure, parameter delta_nm
  drude_asymptotic,    // pressure, parameter delta_nm (fixed T)
  total_force_drude,   // sphere force + patch + offset, parameters v_rms_mV, offset_pN
  total_force_plasma,
};

inline const char* to_string(TheoryFamily f) {
  switch (f) {
    case TheoryFamily::plasma_asymptotic: return "plasma-asymptotic";
    case TheoryFamily::drude_asymptotic: return "drude-asymptotic";
    case TheoryFamily::total_force_drude: return "total-force-drude";
    case TheoryFamily::total_force_plasma: return "total-force-plasma";
  }
  return "?";
}

inline TheoryFamily theory_family_from_string(const std::string& s) {
  if (s == "plasma-asymptotic") return TheoryFamily::plasma_asymptotic;
  if (s == "drude-asymptotic") return TheoryFamily::drude_asymptotic;
  if (s == "total-force-drude") return TheoryFamily::total_force_drude;
  if (s == "total-force-plasma") return TheoryFamily::total_force_plasma;
  throw ConfigError("unknown theory family: " + s);
}

struct ParamSpec {
  std::string name;
  double lower = 0.0;
  double upper = 0.0;
};

enum class ErrorModel {
  value_sigma_only,    // sum (P_i - P_th)^2 / sigma_i^2
  effective_variance,  // sigma_eff^2 = sigma_i^2 + (dP_th/dd * sigma_d_i)^2
};

struct FitSpec {
  TheoryFamily family = TheoryFamily::plasma_asymptotic;
  std::vector<ParamSpec> free_params;
  double temperature_K = 300.0;
  double radius_m = 0.0;        // total-force families
  double omega_p_eV = 9.0;      // material behind the total-force Casimir term
  double gamma_eV = 0.035;
  ErrorModel error_model = ErrorModel::value_sigma_only;
};

// Canonical parameter sets and bounds per family.
inline FitSpec default_fit_spec(TheoryFamily family) {
  FitSpec spec;
  spec.family = family;
  switch (family) {
    case TheoryFamily::plasma_asymptotic:
    case TheoryFamily::drude_asymptotic:
      spec.free_params = {{"delta_nm", 0.1, 100.0}};
      break;
    case TheoryFamily::total_force_drude:
    case TheoryFamily::total_force_plasma:
      spec.free_params = {{"v_rms_mV", 0.0, 100.0}, {"offset_pN", -100.0, 100.0}};
      spec.radius_m = 0.156;
      break;
  }
  return spec;
}

struct FitResult {
  double chi2_min = 0.0;
  std::vector<std::string> param_names;
  std::vector<double> params;
  int dof = 0;
  double probability = 0.0;
  bool boundary_warning = false;
};

// ---------------------------------------------------------------------------
// Theory evaluation
// ---------------------------------------------------------------------------

using TheoryFn = std::function<double(double d_nm, std::span<const double> params)>;

namespace detail {

inline void validate_spec(const FitSpec& spec) {
  const std::size_t k = spec.free_params.size();
  if (k < 1 || k > 2) throw std::domain_error("fit spec must have 1 or 2 free parameters");
  for (const auto& p : spec.free_params) {
    if (!(p.upper > p.lower)) throw std::domain_error("parameter bounds must satisfy lower < upper");
  }
  switch (spec.family) {
    case TheoryFamily::plasma_asymptotic:
    case TheoryFamily::drude_asymptotic:
      if (k != 1 || spec.free_params[0].name != "delta_nm")
        throw std::domain_error("asymptotic families take the single parameter delta_nm");
      break;
    case TheoryFamily::total_force_drude:
    case TheoryFamily::total_force_plasma:
      if (k != 2 || spec.free_params[0].name != "v_rms_mV" ||
          spec.free_params[1].name != "offset_pN")
        throw std::domain_error("total-force families take parameters v_rms_mV, offset_pN");
      if (!(spec.radius_m > 0.0)) throw std::domain_error("total-force families need radius_m > 0");
      break;
  }
}

inline PermittivityModel total_force_material(const FitSpec& spec) {
  if (spec.family == TheoryFamily::total_force_plasma) {
    return PermittivityModel(Plasma{OscillatorSet{}, spec.omega_p_eV});
  }
  return PermittivityModel(Drude{OscillatorSet{}, spec.omega_p_eV, spec.gamma_eV});
}

}  // namespace detail

// Sphere-plate Casimir force (N) behind the total-force families, PFA over
// the full engine.
inline double total_force_casimir_base(const FitSpec& spec, double d_nm) {
  const PermittivityModel material = detail::total_force_material(spec);
  PlatePair plates{material, material, d_nm, spec.temperature_K};
  const SpherePlateGeometry geometry{d_nm, spec.radius_m * 1e9};
  return pfa_force(geometry, plates);
}

// Builds the theory function for a spec. The Casimir part of the total-force
// families does not depend on the fit parameters, so it is evaluated once per
// abscissa (seeded from `data` when given) and reused across the
// minimization.
inline TheoryFn make_theory(const FitSpec& spec, const MeasurementSet* data = nullptr) {
  detail::validate_spec(spec);
  switch (spec.family) {
    case TheoryFamily::plasma_asymptotic:
      return [](double d_nm, std::span<const double> p) { return plasma_pressure(d_nm, p[0]); };
    case TheoryFamily::drude_asymptotic: {
      const double T = spec.temperature_K;
      return [T](double d_nm, std::span<const double> p) { return drude_pressure(d_nm, p[0], T); };
    }
    case TheoryFamily::total_force_drude:
    case TheoryFamily::total_force_plasma: {
      auto cache = std::make_shared<std::unordered_map<double, double>>();
      if (data) {
        for (const auto& point : data->points) {
          cache->emplace(point.d_nm, total_force_casimir_base(spec, point.d_nm));
        }
      }
      const FitSpec captured = spec;
      return [captured, cache](double d_nm, std::span<const double> p) {
        auto it = cache->find(d_nm);
        const double f_cas = (it != cache->end())
                                 ? it->second
                                 : cache->emplace(d_nm, total_force_casimir_base(captured, d_nm))
                                       .first->second;
        const PatchParams patch{p[0] * 1e-3, p[1] * 1e-12, captured.radius_m};
        return total_force([&](double) { return f_cas; }, patch, d_nm);
      };
    }
  }
  throw std::logic_error("unreachable");
}

// ---------------------------------------------------------------------------
// chi^2 objective
// ---------------------------------------------------------------------------

inline double chi_square(const MeasurementSet& data, const TheoryFn& theory,
                         std::span<const double> params,
                         ErrorModel error_model = ErrorModel::value_sigma_only) {
  data.validate();
  KahanSum sum;
  for (const auto& point : data.points) {
    const double th = theory(point.d_nm, params);
    double variance = point.sigma_value * point.sigma_value;
    if (error_model == ErrorModel::effective_variance && point.sigma_d_nm > 0.0) {
      const double h = std::max(1e-3 * point.d_nm, 0.01);
      const double slope = (theory(point.d_nm + h, params) - theory(point.d_nm - h, params)) /
                           (2.0 * h);
      variance += slope * point.sigma_d_nm * slope * point.sigma_d_nm;
    }
    const double r = point.value - th;
    sum.add(r * r / variance);
  }
  return sum.value();
}

// ---------------------------------------------------------------------------
// Bounded minimization: golden section (k = 1), Nelder-Mead (k = 2)
// ---------------------------------------------------------------------------

namespace detail {

// Interval reduction well past the guaranteed 1e-4 relative tolerance; the
// extra iterations are one objective evaluation each and polish the last
// digits of noiseless recoveries.
template <class F>
double golden_section(F&& f, double lo, double hi, double rel_tol, double* x_min) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 500; ++it) {
    if (b - a <= rel_tol * std::max({std::abs(a), std::abs(b), 1e-12})) break;
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  *x_min = 0.5 * (a + b);
  return f(*x_min);
}

struct SimplexResult {
  std::array<double, 2> x;
  double value = 0.0;
  bool converged = false;
};

// Nelder-Mead on the unit square with clamped evaluation; converged when the
// simplex diameter falls below diam_tol.
template <class F>
SimplexResult nelder_mead_2d(F&& f, std::array<double, 2> start, double diam_tol, int max_iter) {
  using Point = std::array<double, 2>;
  auto clamp01 = [](Point p) {
    for (double& v : p) v = std::clamp(v, 0.0, 1.0);
    return p;
  };
  const double h = 0.05;
  std::array<Point, 3> v;
  v[0] = clamp01(start);
  v[1] = clamp01({start[0] + (start[0] + h <= 1.0 ? h : -h), start[1]});
  v[2] = clamp01({start[0], start[1] + (start[1] + h <= 1.0 ? h : -h)});
  std::array<double, 3> fv = {f(v[0]), f(v[1]), f(v[2])};

  auto order = [&] {
    if (fv[0] > fv[1]) { std::swap(fv[0], fv[1]); std::swap(v[0], v[1]); }
    if (fv[1] > fv[2]) { std::swap(fv[1], fv[2]); std::swap(v[1], v[2]); }
    if (fv[0] > fv[1]) { std::swap(fv[0], fv[1]); std::swap(v[0], v[1]); }
  };
  auto diameter = [&] {
    double dm = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j)
        dm = std::max(dm, std::hypot(v[i][0] - v[j][0], v[i][1] - v[j][1]));
    return dm;
  };

  SimplexResult result;
  for (int it = 0; it < max_iter; ++it) {
    order();
    if (diameter() < diam_tol) {
      result.converged = true;
      break;
    }
    const Point centroid{0.5 * (v[0][0] + v[1][0]), 0.5 * (v[0][1] + v[1][1])};
    auto along = [&](double t) {
      return clamp01({centroid[0] + t * (centroid[0] - v[2][0]),
                      centroid[1] + t * (centroid[1] - v[2][1])});
    };
    const Point xr = along(1.0);
    const double fr = f(xr);
    if (fr < fv[0]) {
      const Point xe = along(2.0);
      const double fe = f(xe);
      if (fe < fr) { v[2] = xe; fv[2] = fe; } else { v[2] = xr; fv[2] = fr; }
    } else if (fr < fv[1]) {
      v[2] = xr;
      fv[2] = fr;
    } else {
      const Point xc = along(fr < fv[2] ? 0.5 : -0.5);
      const double fc = f(xc);
      if (fc < std::min(fr, fv[2])) {
        v[2] = xc;
        fv[2] = fc;
      } else {
        for (int i = 1; i < 3; ++i) {
          v[i] = {0.5 * (v[i][0] + v[0][0]), 0.5 * (v[i][1] + v[0][1])};
          fv[i] = f(v[i]);
        }
      }
    }
  }
  order();
  result.x = v[0];
  result.value = fv[0];
  return result;
}

}  // namespace detail

inline FitResult minimize(const FitSpec& spec, const MeasurementSet& data) {
  detail::validate_spec(spec);
  data.validate();
  const std::size_t k = spec.free_params.size();
  const int n = static_cast<int>(data.points.size());
  const int dof = n - static_cast<int>(k);
  if (dof < 1) throw std::domain_error("fit needs N - k >= 1 degrees of freedom");

  const TheoryFn theory = make_theory(spec, &data);
  auto objective = [&](std::span<const double> p) {
    return chi_square(data, theory, p, spec.error_model);
  };

  FitResult result;
  result.dof = dof;
  for (const auto& p : spec.free_params) result.param_names.push_back(p.name);

  if (k == 1) {
    const double lo = spec.free_params[0].lower, hi = spec.free_params[0].upper;
    double x = lo;
    const double chi2 = detail::golden_section(
        [&](double v) {
          const double arr[1] = {v};
          return objective(arr);
        },
        lo, hi, 1e-7, &x);
    result.params = {x};
    result.chi2_min = chi2;
  } else {
    const double lo0 = spec.free_params[0].lower, hi0 = spec.free_params[0].upper;
    const double lo1 = spec.free_params[1].lower, hi1 = spec.free_params[1].upper;
    auto denorm = [&](std::array<double, 2> u) {
      return std::array<double, 2>{lo0 + u[0] * (hi0 - lo0), lo1 + u[1] * (hi1 - lo1)};
    };
    auto f = [&](std::array<double, 2> u) {
      const auto x = denorm(u);
      return objective(std::span<const double>(x.data(), 2));
    };

    // 5x5 bound-spanning seed grid; the 20 best seeds start independent
    // simplex searches, merged by (chi2, parameters) order.
    struct Seed { double value; std::array<double, 2> u; };
    std::vector<Seed> seeds;
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < 5; ++j) {
        const std::array<double, 2> u{0.25 * i, 0.25 * j};
        seeds.push_back({f(u), u});
      }
    }
    std::sort(seeds.begin(), seeds.end(), [](const Seed& a, const Seed& b) {
      if (a.value != b.value) return a.value < b.value;
      if (a.u[0] != b.u[0]) return a.u[0] < b.u[0];
      return a.u[1] < b.u[1];
    });

    bool any_converged = false;
    detail::SimplexResult best;
    best.value = std::numeric_limits<double>::infinity();
    const int restarts = std::min<std::size_t>(20, seeds.size());
    for (int r = 0; r < restarts; ++r) {
      auto res = detail::nelder_mead_2d(f, seeds[r].u, 1e-6, 2000);
      if (!res.converged) continue;
      any_converged = true;
      if (res.value < best.value ||
          (res.value == best.value &&
           std::lexicographical_compare(res.x.begin(), res.x.end(), best.x.begin(), best.x.end()))) {
        best = res;
      }
    }
    if (!any_converged) {
      throw FitConvergenceError("no simplex restart reached the diameter tolerance");
    }
    const auto x = denorm(best.x);
    result.params = {x[0], x[1]};
    result.chi2_min = best.value;
  }

  result.probability = chi2_survival(result.chi2_min, result.dof);
  for (std::size_t i = 0; i < k; ++i) {
    const double span = spec.free_params[i].upper - spec.free_params[i].lower;
    if (result.params[i] - spec.free_params[i].lower < 0.01 * span ||
        spec.free_params[i].upper - result.params[i] < 0.01 * span) {
      result.boundary_warning = true;
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Synthetic measurements
// ---------------------------------------------------------------------------

// values = theory(d_i) + N(0, sigma_i), sigma_i = relative_noise * |theory(d_i)|.
// With relative_noise = 0 the values are exact and a 1% sigma is attached so
// the set still satisfies sigma > 0 for weighting.
inline MeasurementSet synthesize(const std::function<double(double)>& theory,
                                 std::span<const double> separations_nm, double relative_noise,
                                 std::uint64_t seed, QuantityKind kind = QuantityKind::pressure) {
  if (separations_nm.empty()) throw std::domain_error("synthesize needs a non-empty grid");
  if (relative_noise < 0.0) throw std::domain_error("noise must be >= 0");
  const CounterRng rng(seed);
  MeasurementSet set;
  set.kind = kind;
  set.points.reserve(separations_nm.size());
  for (std::size_t i = 0; i < separations_nm.size(); ++i) {
    const double d = separations_nm[i];
    const double th = theory(d);
    const double sigma = (relative_noise > 0.0 ? relative_noise : 0.01) * std::abs(th);
    if (!(sigma > 0.0)) throw std::domain_error("synthesize: theory value yields sigma = 0");
    const double value = th + (relative_noise > 0.0 ? rng.normal(i) * sigma : 0.0);
    set.points.push_back({d, value, sigma, 0.0});
  }
  return set;
}

// ---------------------------------------------------------------------------
// Two-model discrimination
// ---------------------------------------------------------------------------

struct ParameterPlausibility {
  std::string name;
  double fitted = 0.0;
  double known = 0.0;
  double relative_deviation = 0.0;
  bool implausible = false;
};

struct DiscriminationReport {
  enum class Verdict { a_favored, b_favored, indeterminate };
  FitResult fit_a, fit_b;
  std::vector<ParameterPlausibility> plausibility_a, plausibility_b;
  Verdict verdict = Verdict::indeterminate;
};

inline const char* to_string(DiscriminationReport::Verdict v) {
  switch (v) {
    case DiscriminationReport::Verdict::a_favored: return "A-favored";
    case DiscriminationReport::Verdict::b_favored: return "B-favored";
    case DiscriminationReport::Verdict::indeterminate: return "indeterminate";
  }
  return "?";
}

// Both fits plus plausibility flags against independently known parameter
// values. The verdict is indeterminate whenever both survival probabilities
// exceed `probability_floor`: a good fit alone cannot select a model.
inline DiscriminationReport discriminate(const MeasurementSet& data, const FitSpec& spec_a,
                                         const FitSpec& spec_b,
                                         const std::map<std::string, double>& known_params = {},
                                         double probability_floor = 0.05,
                                         double implausibility_threshold = 0.25) {
  DiscriminationReport report;
  report.fit_a = minimize(spec_a, data);
  report.fit_b = minimize(spec_b, data);

  auto flag = [&](const FitResult& fit) {
    std::vector<ParameterPlausibility> flags;
    for (std::size_t i = 0; i < fit.param_names.size(); ++i) {
      const auto it = known_params.find(fit.param_names[i]);
      if (it == known_params.end() || it->second == 0.0) continue;
      ParameterPlausibility p;
      p.name = fit.param_names[i];
      p.fitted = fit.params[i];
      p.known = it->second;
      p.relative_deviation = std::abs(p.fitted - p.known) / std::abs(p.known);
      p.implausible = p.relative_deviation > implausibility_threshold;
      flags.push_back(p);
    }
    return flags;
  };
  report.plausibility_a = flag(report.fit_a);
  report.plausibility_b = flag(report.fit_b);

  const double pa = report.fit_a.probability, pb = report.fit_b.probability;
  if ((pa > probability_floor && pb > probability_floor) || pa == pb) {
    report.verdict = DiscriminationReport::Verdict::indeterminate;
  } else if (pa > pb) {
    report.verdict = DiscriminationReport::Verdict::a_favored;
  } else {
    report.verdict = DiscriminationReport::Verdict::b_favored;
  }
  return report;
}

}  // namespace casimir
