#include "greenlab/scattering.hpp"

#include <algorithm>
#include <numeric>

#include "greenlab/fit.hpp"

namespace greenlab {

FreeAmplitude::FreeAmplitude(const FieldSpec& f, int n_radial, int n_theta, int n_phi) {
  if (f.zero) {
    zero_ = true;
    return;
  }
  require(f.support.has_value(), ErrorKind::Precondition, "free_amplitude: f needs a support ball");
  const SupportBall& s = *f.support;
  require(s.center.norm() + s.radius <= 1.0 + 1e-12, ErrorKind::Precondition,
          "free_amplitude: support must lie in the unit ball");
  NodeSet nodes;
  ball_nodes(s.center, s.radius, n_radial, n_theta, n_phi, false, nodes);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double v = f.value(nodes.p[i]);
    if (v == 0.0) continue;
    p_.push_back(nodes.p[i]);
    wf_.push_back(nodes.w[i] * v / (4.0 * pi));
  }
  zero_ = p_.empty();
}

Complex FreeAmplitude::operator()(Complex k, const Point3& theta) const {
  Complex acc{};
  const Complex mik = Complex(0.0, -1.0) * k;
  for (std::size_t i = 0; i < p_.size(); ++i) acc += wf_[i] * std::exp(mik * theta.dot(p_[i]));
  return acc;
}

double FreeAmplitude::norm(Complex k, const SphereRule& rule) const {
  double s = 0.0;
  for (std::size_t j = 0; j < rule.dirs.size(); ++j) s += rule.w[j] * std::norm((*this)(k, rule.dirs[j]));
  return std::sqrt(s);
}

Complex free_amplitude(const FieldSpec& f, Complex k, const Point3& theta) {
  return FreeAmplitude(f)(k, theta);
}

double FarFieldAmplitude::norm2() const {
  double s = 0.0;
  for (std::size_t j = 0; j < values.size(); ++j) s += weights[j] * std::norm(values[j]);
  return s;
}

FarFieldAmplitude free_far_field(const FieldSpec& f, Complex k, int n_theta, int n_phi) {
  const FreeAmplitude amp(f);
  const SphereRule& rule = sphere_rule(n_theta, n_phi);
  FarFieldAmplitude A;
  A.k = {k.real(), k.imag()};
  A.n_theta = n_theta;
  A.n_phi = n_phi;
  A.directions = rule.dirs;
  A.weights = rule.w;
  for (const Point3& d : rule.dirs) A.values.push_back(amp(k, d));
  A.residuals.assign(A.values.size(), 0.0);
  return A;
}

AmplitudeExtraction extract_amplitude(const std::vector<double>& radii, const std::vector<Complex>& u,
                                      Complex k) {
  require(radii.size() == u.size(), ErrorKind::Parameter, "extract_amplitude: size mismatch");
  require(radii.size() >= 4, ErrorKind::InsufficientData, "extract_amplitude: need at least 4 radii");
  std::vector<std::size_t> order(radii.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return radii[a] > radii[b]; });
  std::vector<double> h;
  std::vector<Complex> g;
  double scale = 0.0;
  for (std::size_t i : order) {
    require(radii[i] > 0, ErrorKind::Parameter, "extract_amplitude: radii must be positive");
    h.push_back(1.0 / radii[i]);
    g.push_back(radii[i] * std::exp(Complex(0.0, -1.0) * k * radii[i]) * u[i]);
    scale = std::max(scale, std::abs(g.back()));
  }
  AmplitudeExtraction out;
  if (scale == 0.0) return out;

  // Diagonal Neville values: diag[m] interpolates the m+1 largest radii.
  std::vector<Complex> p(g), diag{g[0]};
  for (std::size_t m = 1; m < h.size(); ++m) {
    for (std::size_t i = 0; i + m < h.size(); ++i)
      p[i] = (h[i + m] * p[i] - h[i] * p[i + 1]) / (h[i + m] - h[i]);
    diag.push_back(p[0]);
  }
  std::vector<double> res;
  for (std::size_t i = 1; i < diag.size(); ++i) res.push_back(std::abs(diag[i] - diag[i - 1]));
  const std::size_t best = std::min_element(res.begin(), res.end()) - res.begin();
  bool decreasing = false;
  for (std::size_t i = 1; i < res.size(); ++i) decreasing = decreasing || res[i] < res[i - 1];
  if (!decreasing && res[best] > 1e-12 * scale)
    throw Error(ErrorKind::Extraction, "extract_amplitude: extrapolation residuals do not decrease");
  out.value = diag[best + 1];
  out.residual = res[best];
  return out;
}

AmplitudeExtraction extract_amplitude(const ResolventTable& table, std::size_t ray) {
  require(ray < table.directions.size(), ErrorKind::Parameter, "extract_amplitude: ray out of range");
  std::vector<Complex> u(table.radii.size());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = table.values(ray, i);
  return extract_amplitude(table.radii, u, table.k.k());
}

FarFieldAmplitude far_field_from_resolvent(const ComplexWavenumber& k, const FieldSpec& Q,
                                           const FieldSpec& f, int n_theta, int n_phi,
                                           const std::vector<double>& radii, const BornOptions& opt) {
  const SphereRule& rule = sphere_rule(n_theta, n_phi);
  const ResolventTable table = solve_resolvent(k, Q, f, rule.dirs, radii, opt);
  FarFieldAmplitude A;
  A.k = k;
  A.n_theta = n_theta;
  A.n_phi = n_phi;
  A.directions = rule.dirs;
  A.weights = rule.w;
  A.radii = radii;
  for (std::size_t j = 0; j < rule.dirs.size(); ++j) {
    const AmplitudeExtraction e = extract_amplitude(table, j);
    A.values.push_back(e.value);
    A.residuals.push_back(e.residual);
  }
  return A;
}

SpectralDensitySample spectral_density(const FarFieldAmplitude& A, double k) {
  require(k > 0, ErrorKind::Parameter, "spectral_density: k must be positive");
  return {k * k, k / pi * A.norm2()};
}

}  // namespace greenlab
