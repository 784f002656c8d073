#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "greenlab/errors.hpp"

namespace greenlab {

template <typename Scalar>
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;
using Point3 = Vec3<double>;
using Complex = std::complex<double>;

inline constexpr double pi = std::numbers::pi;

// Angle between two nonzero vectors, computed with atan2 so that it stays
// accurate near 0 and π.
template <typename Derived1, typename Derived2>
typename Derived1::Scalar angle_zeta(const Eigen::MatrixBase<Derived1>& u,
                                     const Eigen::MatrixBase<Derived2>& v) {
  using std::atan2;
  const auto nu = u.norm();
  const auto nv = v.norm();
  require(nu > 0 && nv > 0, ErrorKind::Domain, "angle_zeta: zero vector");
  return atan2(u.cross(v).norm(), u.dot(v));
}

struct ComplexWavenumber {
  double tau = 0.0;
  double delta = 0.0;

  Complex k() const { return {tau, delta}; }
  Complex z() const { return k() * k(); }
};

// Orthonormal pair spanning the plane orthogonal to the unit vector e.
void orthonormal_complement(const Point3& e, Point3& e1, Point3& e2);

// 26 directions: normalized face, edge and corner vectors of the cube.
std::vector<Point3> cube_directions();

// Deterministic, roughly uniform directions (spherical Fibonacci lattice).
std::vector<Point3> fibonacci_directions(int n);

}  // namespace greenlab
