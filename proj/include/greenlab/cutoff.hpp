#pragma once

#include "greenlab/field.hpp"

namespace greenlab {

// Quintic smoothstep falling from 1 at t = 0 to 0 at t = 1; C² with
// max |d/dt| = 15/8 at t = 1/2.
template <typename Scalar>
Scalar smoothstep_taper(Scalar t) {
  if (t <= Scalar(0)) return Scalar(1);
  if (t >= Scalar(1)) return Scalar(0);
  return Scalar(1) - t * t * t * (Scalar(10) + t * (Scalar(-15) + Scalar(6) * t));
}

template <typename Scalar>
Scalar smoothstep_taper_derivative(Scalar t) {
  if (t <= Scalar(0) || t >= Scalar(1)) return Scalar(0);
  const Scalar s = t * (Scalar(1) - t);
  return Scalar(-30) * s * s;
}

inline constexpr double cutoff_gradient_bound = 15.0 / 8.0;

// χ_R(x): 1 on |x| <= R, 0 on |x| >= R + 1.
template <typename Derived>
typename Derived::Scalar eval_cutoff(const Eigen::MatrixBase<Derived>& x,
                                     typename Derived::Scalar R) {
  require(R > 0, ErrorKind::Parameter, "eval_cutoff: R must be positive");
  return smoothstep_taper(x.norm() - R);
}

template <typename Derived>
Vec3<typename Derived::Scalar> cutoff_gradient(const Eigen::MatrixBase<Derived>& x,
                                               typename Derived::Scalar R) {
  using S = typename Derived::Scalar;
  const S r = x.norm();
  if (r <= R || r >= R + 1) return Vec3<S>::Zero();
  return (smoothstep_taper_derivative(r - R) / r) * x;
}

struct CutoffSplit {
  double R = 1.0;
  FieldSpec Q1;  // χ_R Q
  FieldSpec Q2;  // (1 − χ_R) Q

  double chi(const Point3& x) const { return eval_cutoff(x, R); }
};

// Splits a vector field; the pieces carry analytic divergences
// div(χQ) = χ div Q + ∇χ·Q whenever Q has one.
CutoffSplit make_cutoff_split(const FieldSpec& Q, double R);

}  // namespace greenlab
