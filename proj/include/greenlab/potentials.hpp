#pragma once

#include "greenlab/field.hpp"

namespace greenlab {

// Radial profile of the standard bump φ(x) = exp(−1/(1−|x|²)) on |x| < 1.
double bump_profile(double r);
double bump_profile_derivative(double r);
double bump_profile_laplacian(double r);

// ∫_{ℝ³} φ(x) dx for the standard bump.
inline constexpr double bump_integral = 0.44108888727659;

FieldSpec bump_scalar(double amplitude, const Point3& center = Point3::Zero(), double radius = 1.0);

// Q(x) = eta · φ((x − c)/radius) · direction, with analytic divergence.
FieldSpec bump_vector_field(double eta, const Point3& direction = Point3::UnitX(),
                            const Point3& center = Point3::Zero(), double radius = 1.0);

FieldSpec gaussian_scalar(double amplitude, double width = 1.0);

// v = ∇(A e^{−|x|²}) with analytic divergence A(4|x|² − 6)e^{−|x|²}.
FieldSpec gaussian_gradient_field(double amplitude);

FieldSpec unit_ball_indicator();

struct Example1Fields {
  FieldSpec Q;   // (−cos x₁ (1+|x|²)^{−γ}, 0, 0)
  FieldSpec V2;  // cos x₁ ∂₁(1+|x|²)^{−γ}, short range
  FieldSpec V;   // sin x₁ (1+|x|²)^{−γ} = div Q + V2
};

Example1Fields build_example1(double gamma, double eps = 0.4);

// V = γ div Q + |Q|², nonnegative as a form for |γ| <= 1.
FieldSpec build_proposition_potential(const FieldSpec& Q, double gamma);

// Attach a measured envelope on the default grid.
void measure_envelope(FieldSpec& F, double eps);

}  // namespace greenlab
