#pragma once

#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

namespace casimir {

enum class QuantityKind { pressure, force };

struct MeasurementPoint {
  double d_nm = 0.0;
  double value = 0.0;        // Pa or N depending on kind
  double sigma_value = 0.0;  // same units, > 0
  double sigma_d_nm = 0.0;   // separation uncertainty, ignored by the default objective
};

struct MeasurementSet {
  std::vector<MeasurementPoint> points;
  QuantityKind kind = QuantityKind::pressure;
  double confidence_level_percent = 67.0;

  void validate() const {
    if (points.size() < 2) throw std::domain_error("measurement set needs at least 2 points");
    std::set<double> seen;
    for (const auto& p : points) {
      if (!(p.sigma_value > 0.0)) throw std::domain_error("measurement sigma must be > 0");
      if (!(p.d_nm > 0.0)) throw std::domain_error("measurement separation must be > 0");
      if (!seen.insert(p.d_nm).second)
        throw std::domain_error("measurement separations must be distinct");
    }
  }
};

struct ResidualPoint {
  double d_nm = 0.0;
  double residual = 0.0;  // |measured - theory|, >= 0
  double sigma = 0.0;     // measurement sigma carried through
};

struct ResidualSeries {
  std::vector<ResidualPoint> points;
};

}  // namespace casimir
