#pragma once

#include "greenlab/quadrature.hpp"

namespace greenlab {

struct HelmholtzOptions {
  double split_radius = 1.0;
  // Used when V has no compact support; measured from x.
  double truncation_radius = 32.0;
  int n_radial = 8;      // GL nodes per unit-length radial panel
  int n_theta = 16;
  int n_phi = 32;
  int max_refinements = 2;
  double tol = 1e-9;
};

struct HelmholtzResult {
  Point3 Q = Point3::Zero();
  Point3 Q_near = Point3::Zero();  // |x − y| < split_radius
  Point3 Q_far = Point3::Zero();   // |x − y| > split_radius
  double truncation_radius = 0.0;
  double error = 0.0;
  long nodes = 0;
};

// Q(x) = ∫ (x−y)/(4π|x−y|³) V(y) dy, integrated in spherical coordinates
// about x so that the r² Jacobian cancels the kernel.
HelmholtzResult helmholtz_reconstruct(const FieldSpec& V, const Point3& x,
                                      const HelmholtzOptions& opt = {});

// Central-difference divergence of the reconstructed field.
double helmholtz_divergence(const FieldSpec& V, const Point3& x, double h,
                            const HelmholtzOptions& opt = {});

}  // namespace greenlab
