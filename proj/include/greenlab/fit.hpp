#pragma once

#include <vector>

#include "greenlab/geometry.hpp"

namespace greenlab {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double slope_stderr = 0.0;
  int n = 0;
};

// Ordinary (optionally weighted) least squares y ≈ intercept + slope·x.
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y,
                   const std::vector<double>& weights = {});

// Fit |v| ≈ C r^{−p}; returns p as −slope of log|v| against log r.
LinearFit fit_power_decay(const std::vector<double>& r, const std::vector<double>& v);

// Neville extrapolation of f(h) to h = 0. `residuals` holds the successive
// changes of the extrapolated value as nodes are added.
Complex neville_extrapolate(const std::vector<double>& h, const std::vector<Complex>& f,
                            std::vector<double>* residuals = nullptr);

struct RadialDecayFit {
  LinearFit fit;
  double exponent = 0.0;
  std::vector<double> radii, envelope;
};

// Envelope exponent of |F| along rays: at each radius the max of |F| over the
// directions and a short radial window [r, 1.25 r] is fitted log-log.
template <typename Fn>
RadialDecayFit fit_radial_envelope(Fn&& magnitude, const std::vector<Point3>& directions,
                                   const std::vector<double>& radii, int window = 16) {
  RadialDecayFit out;
  for (double r : radii) {
    double m = 0.0;
    for (const Point3& d : directions)
      for (int s = 0; s < window; ++s) m = std::max(m, magnitude((r * (1.0 + 0.25 * s / window)) * d));
    out.radii.push_back(r);
    out.envelope.push_back(m);
  }
  out.fit = fit_power_decay(out.radii, out.envelope);
  out.exponent = -out.fit.slope;
  return out;
}

}  // namespace greenlab
