#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "greenlab/field.hpp"

namespace greenlab {

struct QuadratureSpec {
  int n_theta = 16;
  int n_phi = 32;
  int n_radial = 16;        // Gauss–Legendre nodes per radial panel
  int max_refinements = 2;  // node-doubling steps allowed to reach tol
  double tol = 1e-10;       // accept when |refined − coarse| <= tol·max(1, |refined|)
  double truncation_tol = 1e-12;  // absolute tail bound for exterior truncation

  void validate() const;
  QuadratureSpec refined(int factor = 2) const;
};

struct QuadratureResult {
  Complex value{};
  double error = 0.0;
  long nodes = 0;
  double truncation_radius = 0.0;
  int refinements = 0;
};

// Weighted node set: ∫ f ≈ Σ w_i f(p_i), summed in index order.
struct NodeSet {
  std::vector<Point3> p;
  std::vector<double> w;

  void clear() { p.clear(); w.clear(); }
  std::size_t size() const { return p.size(); }

  template <typename F>
  auto sum(F&& f) const -> decltype(f(p[0])) {
    decltype(f(p[0])) acc{};
    for (std::size_t i = 0; i < p.size(); ++i) acc += w[i] * f(p[i]);
    return acc;
  }
};

struct Rule1D {
  std::vector<double> x, w;
};

// Gauss–Legendre rule on [−1, 1] (Golub–Welsch), cached per n.
const Rule1D& gauss_legendre(int n);
Rule1D gauss_legendre_on(double a, double b, int n);
// Composite rule with n nodes on each panel between consecutive breakpoints.
Rule1D composite_gauss(const std::vector<double>& breaks, int n);

// Gauss–Legendre in θ (weight sin θ folded in) × trapezoid in φ; weights sum to 4π.
struct SphereRule {
  int n_theta = 0, n_phi = 0;
  std::vector<double> theta, phi;
  std::vector<Point3> dirs;  // index = it * n_phi + ip
  std::vector<double> w;
};
const SphereRule& sphere_rule(int n_theta, int n_phi);

// ∫_{|y−center|=ρ} f dτ
QuadratureResult integrate_sphere(const std::function<Complex(const Point3&)>& f, double rho,
                                  const QuadratureSpec& spec, const Point3& center = Point3::Zero());

// ∫_{|y−center|<R} f_smooth(y)/|y − center| dy in spherical coordinates about center.
QuadratureResult integrate_ball_singular(const std::function<Complex(const Point3&)>& f_smooth,
                                         const Point3& center, double radius,
                                         const QuadratureSpec& spec);

// ∫_{|y−center|<R} f(y) dy in spherical coordinates about center.
QuadratureResult integrate_ball(const std::function<Complex(const Point3&)>& f,
                                const Point3& center, double radius, const QuadratureSpec& spec);

// Per-direction radial breakpoints (radii from the origin of the exterior rule).
using RayBreaks = std::function<void(const Point3& dir, std::vector<double>& breaks)>;

// Radius R* where 4πM ∫_{R*}^∞ r² e^{−δr} dr drops below tol.
double exterior_truncation_radius(double delta, double M, double tol);

// ∫_{ℝ³} f for |f(y)| <= M e^{−δ|y|}, truncated at R*.
QuadratureResult integrate_exterior(const std::function<Complex(const Point3&)>& f,
                                    double damping_delta, double M, const QuadratureSpec& spec,
                                    const RayBreaks& breaks = {});

// Prolate-spheroidal rule for ∫_{s < s_max} F(w) / (|w−a||w−b|) dw with
// s = |w−a| + |w−b|. The Jacobian cancels both singularities. When a support
// ball is given, only the (s, t) box meeting it is integrated.
struct TwoCenterOptions {
  int n_mu = 12, n_nu = 12, n_phi = 12;
  int mu_panels = 2, nu_panels = 2;

  TwoCenterOptions refined(int factor = 2) const;
};

void two_center_nodes(const Point3& a, const Point3& b, double s_max,
                      const std::optional<SupportBall>& restrict, const TwoCenterOptions& opt,
                      NodeSet& out);

QuadratureResult integrate_two_center(const std::function<Complex(const Point3&)>& F,
                                      const Point3& a, const Point3& b, double s_max,
                                      const QuadratureSpec& spec,
                                      const std::optional<SupportBall>& restrict = std::nullopt);

// Node set for a ball about `center`: weights carry r² (plain) or r (singular).
void ball_nodes(const Point3& center, double radius, int n_radial, int n_theta, int n_phi,
                bool singular, NodeSet& out);

enum class RegionTag { Near, Shifted, Upsilon };

// near = {|y| < 2|x|/3}, shifted = {|y−x| < 2|x|/3}, Υ = the rest.
bool in_region(RegionTag tag, const Point3& y, const Point3& x);

}  // namespace greenlab
