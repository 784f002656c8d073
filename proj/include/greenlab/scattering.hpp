#pragma once

#include "greenlab/born.hpp"

namespace greenlab {

// A₀(k,θ) = (4π)⁻¹ ∫ e^{−ik⟨θ,y⟩} f(y) dy for f supported in the unit ball.
// Nodes and f values are frozen at construction so repeated evaluation in k
// and θ only costs the plane-wave sum.
class FreeAmplitude {
 public:
  explicit FreeAmplitude(const FieldSpec& f, int n_radial = 16, int n_theta = 16, int n_phi = 32);

  Complex operator()(Complex k, const Point3& theta) const;
  // ‖A₀(k,·)‖_{L²(Σ)} on the given sphere rule.
  double norm(Complex k, const SphereRule& rule) const;
  bool zero() const { return zero_; }

 private:
  std::vector<Point3> p_;
  std::vector<double> wf_;  // quadrature weight × f(p)/(4π)
  bool zero_ = false;
};

Complex free_amplitude(const FieldSpec& f, Complex k, const Point3& theta);

struct FarFieldAmplitude {
  ComplexWavenumber k;
  int n_theta = 0, n_phi = 0;
  std::vector<Point3> directions;
  std::vector<double> weights;   // sphere-rule weights, summing to 4π
  std::vector<Complex> values;
  std::vector<double> radii;     // extraction radii (empty for closed-form amplitudes)
  std::vector<double> residuals; // extrapolation residual per direction

  // ‖A‖²_{L²(Σ)} by the sphere rule.
  double norm2() const;
};

// Closed-form free amplitude on an (n_theta × n_phi) sphere rule.
FarFieldAmplitude free_far_field(const FieldSpec& f, Complex k, int n_theta = 8, int n_phi = 16);

struct AmplitudeExtraction {
  Complex value{};
  double residual = 0.0;
};

// lim r e^{−ikr} u(rθ) by Neville extrapolation in 1/r. The radii need not be
// sorted; throws Extraction when the residuals never decrease.
AmplitudeExtraction extract_amplitude(const std::vector<double>& radii, const std::vector<Complex>& u,
                                      Complex k);
// Direction `ray` of a resolvent table.
AmplitudeExtraction extract_amplitude(const ResolventTable& table, std::size_t ray);

// Amplitude of u = (H − z)⁻¹ f on a sphere rule; the rule's directions are the rays.
FarFieldAmplitude far_field_from_resolvent(const ComplexWavenumber& k, const FieldSpec& Q,
                                           const FieldSpec& f, int n_theta, int n_phi,
                                           const std::vector<double>& radii,
                                           const BornOptions& opt = {});

struct SpectralDensitySample {
  double E = 0.0;
  double density = 0.0;
};

// σ′(E) = kπ⁻¹‖A(k,·)‖², E = k².
SpectralDensitySample spectral_density(const FarFieldAmplitude& A, double k);

}  // namespace greenlab
