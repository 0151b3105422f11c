#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "casimir/errors.hpp"

namespace casimir {

// Compensated (Kahan) accumulator. Used wherever many terms of one sign are
// reduced in a fixed order, so results do not depend on worker count.
class KahanSum {
 public:
  void add(double x) {
    const double y = x - compensation_;
    const double t = sum_ + y;
    compensation_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

namespace quad {

struct GaussRule {
  std::vector<double> nodes;    // Legendre: on [-1,1]; Laguerre: on [0,inf)
  std::vector<double> weights;
};

// Gauss-Legendre nodes/weights by Newton iteration on P_n. Computed rather
// than transcribed so there is nothing to mistype.
inline GaussRule legendre_rule(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) < 1e-15) break;
    }
    rule.nodes[i] = -z;
    rule.nodes[n - 1 - i] = z;
    rule.weights[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    rule.weights[n - 1 - i] = rule.weights[i];
  }
  return rule;
}

// Gauss-Laguerre (weight e^{-x} on [0,inf)). The recurrence values of L_n
// overflow for large n at large x, so the iteration renormalizes and tracks
// the scale in log space; weights are reassembled from logs (far-tail weights
// underflow to zero, which is the correct limit).
inline GaussRule laguerre_rule(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  double z = 0.0;
  for (int i = 0; i < n; ++i) {
    if (i == 0) {
      z = 3.0 / (1.0 + 2.4 * n);
    } else if (i == 1) {
      z += 15.0 / (1.0 + 2.5 * n);
    } else {
      const double ai = i - 1;
      z += ((1.0 + 2.55 * ai) / (1.9 * ai)) * (z - rule.nodes[i - 2]);
    }
    double pp = 0.0, p2 = 0.0, log_scale = 0.0;
    for (int it = 0; it < 200; ++it) {
      double p1 = 1.0;
      p2 = 0.0;
      log_scale = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0 - z) * p2 - j * p3) / (j + 1.0);
        const double mag = std::abs(p1);
        if (mag > 1e250) {
          p1 /= mag;
          p2 /= mag;
          log_scale += std::log(mag);
        }
      }
      pp = n * (p1 - p2) / z;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-14 * std::max(1.0, z)) break;
    }
    rule.nodes[i] = z;
    // w = -1/(pp * n * p2); assembled via logs because pp*p2 carries scale^2.
    const double log_w = -(std::log(std::abs(pp)) + std::log(static_cast<double>(n)) +
                           std::log(std::abs(p2)) + 2.0 * log_scale);
    const double sign = (pp * p2 < 0.0) ? 1.0 : -1.0;
    rule.weights[i] = sign * std::exp(log_w);
  }
  return rule;
}

namespace detail {

inline const GaussRule& gl8() {
  static const GaussRule rule = legendre_rule(8);
  return rule;
}
inline const GaussRule& gl16() {
  static const GaussRule rule = legendre_rule(16);
  return rule;
}

template <class F>
double fixed_gauss(const GaussRule& rule, F&& f, double a, double b) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  KahanSum acc;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    acc.add(rule.weights[i] * f(mid + half * rule.nodes[i]));
  }
  return half * acc.value();
}

template <class F>
double adaptive_panel(F&& f, double a, double b, double abs_budget, int depth) {
  const double coarse = fixed_gauss(gl8(), f, a, b);
  const double fine = fixed_gauss(gl16(), f, a, b);
  const double err = std::abs(fine - coarse);
  if (err <= abs_budget || depth >= 48) {
    if (depth >= 48 && err > 1e3 * abs_budget) {
      throw ConvergenceError("adaptive quadrature: panel refinement exhausted");
    }
    return fine;
  }
  const double mid = 0.5 * (a + b);
  return adaptive_panel(f, a, mid, 0.5 * abs_budget, depth + 1) +
         adaptive_panel(f, mid, b, 0.5 * abs_budget, depth + 1);
}

}  // namespace detail

// Adaptive Gauss-Legendre panels with an error budget relative to the whole
// integral. A 4-panel presplit seeds the magnitude reference so a peaked
// integrand cannot fool the initial estimate.
template <class F>
double integrate_adaptive(F&& f, double a, double b, double rel_tol) {
  if (!(b > a)) return 0.0;
  double ref = 0.0;
  const double quarter = 0.25 * (b - a);
  for (int k = 0; k < 4; ++k) {
    ref += std::abs(detail::fixed_gauss(detail::gl16(), f, a + k * quarter, a + (k + 1) * quarter));
  }
  const double budget = rel_tol * std::max(ref, 1e-300);
  double total = 0.0;
  for (int k = 0; k < 4; ++k) {
    total += detail::adaptive_panel(f, a + k * quarter, a + (k + 1) * quarter,
                                    0.25 * budget, 0);
  }
  return total;
}

}  // namespace quad
}  // namespace casimir
