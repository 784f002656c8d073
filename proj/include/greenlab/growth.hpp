#pragma once

#include "greenlab/born.hpp"
#include "greenlab/fit.hpp"

namespace greenlab {

// Calibration recipe for C_cal: for each bump field η·φ(|x|/ρ)e₁ and each δ,
// run the Born iteration with source G⁰(·, 0) at k = τ + iδ and record
// q_obs·δ³/m(Q); C_cal is the maximum over the family.
struct CalibrationFamily {
  std::vector<double> etas = {0.25, 0.5};
  std::vector<double> radii = {0.75, 1.0};
  std::vector<double> deltas = {0.4, 0.5, 0.6};
  double tau = 1.0;
};

struct CalibrationResult {
  double c_cal = 0.0;
  std::vector<double> samples;  // q_obs·δ³/m per family member
};

CalibrationResult calibrate_smallness(const CalibrationFamily& family = {}, const BornOptions& opt = {});

struct GrowthOptions {
  double tau = 1.0;
  int octave_samples = 8;
};

struct GrowthEstimate {
  double delta = 0.0;
  double R_used = 0.0;       // [δ³/(2 C_cal)]^{−2/ε}
  double A_delta = 0.0;      // exp(log_A_delta); +inf when it overflows
  double log_A_delta = 0.0;
  double A_free = 0.0;       // same route with the Q₂ Neumann tail removed
  double log_A_free = 0.0;
  double q2 = 0.0;           // C_cal·m(Q₂)/δ³ with envelope exponent ε/2
  double m_Q2 = 0.0;
  double v1_sup = 0.0;       // sup |div(χ_R Q)|
  double source_norm = 0.0;
  double kernel_log_proxy = 0.0;  // log lim-sup proxy of |x|e^{δ|x|}‖G⁰(x,·)‖_{L²(B_{R+1})}
  double octave_lo = 0.0, octave_hi = 0.0;
  double gamma_fit = std::numeric_limits<double>::quiet_NaN();
};

// Split-route bound on lim sup |x|e^{δ|x|}|u(x,k)| for u = (H − z)⁻¹f.
GrowthEstimate cutoff_resolvent_growth(const FieldSpec& Q, const FieldSpec& f, double delta, double eps,
                                       double c_cal, const GrowthOptions& opt = {});

struct GrowthSweep {
  std::vector<GrowthEstimate> points;
  LinearFit fit;  // log log A against log δ
  double gamma_fit = std::numeric_limits<double>::quiet_NaN();
};

GrowthSweep growth_sweep(const FieldSpec& Q, const FieldSpec& f, const std::vector<double>& deltas,
                         double eps, double c_cal, const GrowthOptions& opt = {});

}  // namespace greenlab
