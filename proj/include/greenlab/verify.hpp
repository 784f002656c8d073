#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "greenlab/anderson.hpp"
#include "greenlab/fit.hpp"
#include "greenlab/quadrature.hpp"

namespace greenlab {

struct BoundSample {
  double delta = 0.0, rho = 0.0, x = 0.0;
  double lhs = 0.0, shape = 0.0, ratio = 0.0;
};

// One bound LHS < C·shape over a parameter grid. C is the largest ratio; the
// spreads are max/min of the per-|x| and per-ρ maxima of the ratio.
struct BoundSeries {
  std::string name;
  std::vector<BoundSample> samples;
  double C = 0.0;
  double spread_x = 1.0;
  double spread_rho = 1.0;
  bool pass = false;
};

struct BoundSweepReport {
  std::vector<BoundSeries> bounds;
  double gamma_fit = 0.0;  // Lemma 2 only
  double log_C_fit = 0.0;
  double r2 = 0.0;
  bool pass = false;
};

struct LemmaSweepOptions {
  QuadratureSpec quad{32, 64, 16, 3, 1e-9, 1e-14};
  double stability = 2.0;
};

// ∫_{|y|=ρ} e^{−δ(|x−y|+|y|)} ζ^p dτ for p = 0, 1, 2 against δ⁻¹ρ, δ^{−1.5}ρ^{0.5}
// and δ⁻² (each times e^{−δ|x|}). Triples violating 1 < ρ < 2|x|/3 are rejected.
BoundSweepReport lemma1_sweep(const std::vector<double>& deltas, const std::vector<double>& rhos,
                              const std::vector<double>& xs, const LemmaSweepOptions& opt = {});
// Only the (ρ, |x|) pairs satisfying the constraint are used.
BoundSweepReport lemma1_default_sweep(const LemmaSweepOptions& opt = {});

// ∫_Υ e^{−δ(|x−y|+|y|)} dy with Υ = {|y| > 2|x|/3, |x−y| > 2|x|/3}; fits
// ln LHS = ln C − 3 ln δ − γδ|x| and passes iff γ > 1.
BoundSweepReport lemma2_sweep(const std::vector<double>& deltas, const std::vector<double>& xs,
                              const LemmaSweepOptions& opt = {});
double lemma2_lhs(double delta, double x, const QuadratureSpec& quad);

struct TestFunction {
  std::function<double(const Point3&)> value;
  std::function<double(const Point3&)> laplacian;
  double support_radius = 1.0;
};

// Bump φ(|x|/ρ) with its analytic Laplacian.
TestFunction bump_test_function(double radius);
// e^{−|x|²/w²}, treated as supported in |x| < cutoff·w. Its derivatives stay
// moderate, so the h² regime of the check starts at coarse steps.
TestFunction gaussian_test_function(double width, double cutoff = 5.5);

struct DiracReport {
  double h = 0.0;
  double deviation = 0.0;       // max |(𝒟²ψ)₁ − (−Δ + |v|² + div v)ψ|
  double offdiag = 0.0;         // max |(𝒟²ψ)_{2..4}|
  double unitary_error = 0.0;   // max |(U Uᴴ − I)_{ij}|, same for Y
  long grid_points = 0;
};

// Applies 𝒟 twice by central differences to (ψ, 0, …, 0) on a cubic grid of
// step h covering the support of ψ.
DiracReport dirac_factorization_check(const FieldSpec& v, double h, const TestFunction& psi);

Eigen::Matrix4cd dirac_U();

struct AndersonStatsOptions {
  std::vector<double> radii = {4, 8, 16, 32, 64};
  int n_directions = 8;
  int n_gradient_realizations = 8;
  double gradient_step = 0.25;
};

struct AndersonStatsReport {
  int n_realizations = 0;
  std::uint64_t seed = 0;
  std::vector<double> radii;
  std::vector<double> mean_sq, mean_sq_stderr;  // E|Q₂|² per radius (averaged over directions)
  std::vector<double> exact_sq;                 // Σ_j E[ξ²]|c_j|² per radius
  LinearFit decay;         // ln E|Q₂|² against ln(1 + |x|)
  double decay_exponent = 0.0;
  LinearFit sup_decay;     // per-realization sup over directions, averaged exponent
  double sup_exponent = 0.0, sup_exponent_stderr = 0.0;
  // Mean of each component of Q₂ at the first direction of each radius, in units of its stderr.
  std::vector<double> mean_z_scores;
  double max_abs_z = 0.0;
  bool odd_moments_vanish = false;
  std::vector<double> gradient_ratio;  // max |DQ₂| / [ln(1+r)/(1+r)^{0.5+ε}] per radius
  bool undefined = false;              // Q₂ ≡ 0: exponents are not defined
};

AndersonStatsReport anderson_decay_stats(const AndersonPotentialSpec& spec, int n_realizations,
                                         std::uint64_t seed, const AndersonStatsOptions& opt = {});

struct MomentReport {
  int p = 1;
  std::vector<Point3> points;
  std::vector<double> radii;     // |k|
  std::vector<double> empirical, standard_error, exact;
  LinearFit fit;                 // ln E|Q₂|^{2p} against ln(1 + |k|)
  double exponent = 0.0;
  double target = 0.0;           // p(1 + 2ε)
};

// Lattice points of ℤ³ near |k| = r along the 26 cube directions.
std::vector<Point3> lattice_sample_points(const std::vector<double>& radii);

MomentReport moment_bound_check(const AndersonPotentialSpec& spec, int p, const std::vector<Point3>& k_points,
                                int n_realizations, std::uint64_t seed);

// E[ξ²], E[ξ⁴] of the sign law.
double sign_moment(SignLaw law, int order);

}  // namespace greenlab
