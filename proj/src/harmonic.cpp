#include "greenlab/harmonic.hpp"

#include <algorithm>
#include <limits>

#include "greenlab/rng.hpp"

namespace greenlab {

void TriangleDomain::validate() const {
  require(a2 > a1, ErrorKind::Parameter, "TriangleDomain: need a1 < a2");
  require(gamma1 > 2.0, ErrorKind::Parameter, "TriangleDomain: need gamma1 > 2");
}

Complex TriangleDomain::apex() const {
  return {0.5 * (a1 + a2), 0.5 * (a2 - a1) * std::tan(pi / gamma1)};
}

Complex TriangleDomain::vertex(int i) const { return i == 0 ? s1() : i == 1 ? s2() : apex(); }

double TriangleDomain::edge_length(int e) const { return std::abs(vertex((e + 1) % 3) - vertex(e)); }

double TriangleDomain::perimeter() const { return edge_length(0) + edge_length(1) + edge_length(2); }

double TriangleDomain::diameter() const {
  return std::max({edge_length(0), edge_length(1), edge_length(2)});
}

Complex TriangleDomain::centroid() const { return (s1() + s2() + apex()) / 3.0; }

namespace {

double cross(Complex a, Complex b) { return a.real() * b.imag() - a.imag() * b.real(); }

// Distance from z to segment [a, b] and the foot parameter t ∈ [0, 1].
double segment_distance(Complex z, Complex a, Complex b, double& t) {
  const Complex ab = b - a;
  t = std::clamp(((z - a) * std::conj(ab)).real() / std::norm(ab), 0.0, 1.0);
  return std::abs(z - (a + t * ab));
}

}  // namespace

bool TriangleDomain::contains(Complex z) const {
  for (int e = 0; e < 3; ++e)
    if (cross(vertex((e + 1) % 3) - vertex(e), z - vertex(e)) <= 0.0) return false;
  return true;
}

double TriangleDomain::boundary_distance(Complex z) const {
  double d = std::numeric_limits<double>::infinity(), t;
  for (int e = 0; e < 3; ++e) d = std::min(d, segment_distance(z, vertex(e), vertex((e + 1) % 3), t));
  return d;
}

double TriangleDomain::project(Complex z, Complex* foot) const {
  double best = std::numeric_limits<double>::infinity(), arc = 0.0, offset = 0.0;
  for (int e = 0; e < 3; ++e) {
    double t;
    const double d = segment_distance(z, vertex(e), vertex((e + 1) % 3), t);
    if (d < best) {
      best = d;
      arc = offset + t * edge_length(e);
      if (foot) *foot = vertex(e) + t * (vertex((e + 1) % 3) - vertex(e));
    }
    offset += edge_length(e);
  }
  return arc;
}

Complex TriangleDomain::point_at(double arc) const {
  for (int e = 0; e < 3; ++e) {
    const double L = edge_length(e);
    if (arc <= L || e == 2) return vertex(e) + std::min(arc / L, 1.0) * (vertex((e + 1) % 3) - vertex(e));
    arc -= L;
  }
  return s1();
}

double HarmonicMeasureEstimate::bin_width(std::size_t bin) const {
  return triangle.edge_length(edge_of(bin)) / bins_per_edge;
}

double HarmonicMeasureEstimate::bin_arc_center(std::size_t bin) const {
  const int e = edge_of(bin);
  double offset = 0.0;
  for (int i = 0; i < e; ++i) offset += triangle.edge_length(i);
  return offset + (static_cast<double>(bin % bins_per_edge) + 0.5) * bin_width(bin);
}

Complex HarmonicMeasureEstimate::bin_center(std::size_t bin) const {
  return triangle.point_at(bin_arc_center(bin));
}

double HarmonicMeasureEstimate::total_mass() const {
  double s = 0.0;
  for (double m : masses) s += m;
  return s;
}

double HarmonicMeasureEstimate::edge_mass(int edge) const {
  double s = 0.0;
  for (int i = 0; i < bins_per_edge; ++i) s += masses[edge * bins_per_edge + i];
  return s;
}

HarmonicMeasureEstimate harmonic_measure(const TriangleDomain& T, Complex k0, long n_walkers,
                                         std::uint64_t seed, const HarmonicMeasureOptions& opt) {
  T.validate();
  require(n_walkers > 0, ErrorKind::Parameter, "harmonic_measure: n_walkers must be positive");
  require(opt.bins_per_edge > 0, ErrorKind::Parameter, "harmonic_measure: bins_per_edge must be positive");
  require(T.contains(k0), ErrorKind::Domain, "harmonic_measure: k0 must lie strictly inside the triangle");
  HarmonicMeasureEstimate out;
  out.triangle = T;
  out.k0 = k0;
  out.bins_per_edge = opt.bins_per_edge;
  out.n_walkers = n_walkers;
  out.seed = seed;
  out.snap = opt.snap_fraction * T.diameter();
  out.counts.assign(3 * opt.bins_per_edge, 0);
  const double L[3] = {T.edge_length(0), T.edge_length(1), T.edge_length(2)};
  constexpr long max_steps = 1'000'000;

  for (long w = 0; w < n_walkers; ++w) {
    CounterRng rng(seed, static_cast<std::uint64_t>(w));
    Complex z = k0;
    for (long step = 0;; ++step) {
      const double d = T.boundary_distance(z);
      if (d < out.snap || step >= max_steps) break;
      z += std::polar(d, 2.0 * pi * rng.uniform());
    }
    double arc = T.project(z);
    int e = 0;
    while (e < 2 && arc >= L[e]) arc -= L[e++];
    const int b = std::clamp(static_cast<int>(arc / L[e] * opt.bins_per_edge), 0, opt.bins_per_edge - 1);
    ++out.counts[e * opt.bins_per_edge + b];
  }
  const double n = static_cast<double>(n_walkers);
  for (long c : out.counts) {
    const double m = c / n;
    out.masses.push_back(m);
    out.stderrs.push_back(std::sqrt(m * (1.0 - m) / n));
  }
  return out;
}

LinearFit endpoint_exponent(const HarmonicMeasureEstimate& omega, int n_bins) {
  require(n_bins <= omega.bins_per_edge, ErrorKind::Parameter, "endpoint_exponent: too many bins");
  std::vector<double> x, y, w;
  const double width = omega.bin_width(0);
  for (int i = 0; i < n_bins; ++i) {
    if (omega.counts[i] == 0) continue;
    x.push_back(std::log((i + 0.5) * width));
    y.push_back(std::log(omega.masses[i] / width));
    w.push_back(static_cast<double>(omega.counts[i]));
  }
  require(x.size() >= 3, ErrorKind::InsufficientData, "endpoint_exponent: fewer than 3 occupied bins");
  return fit_line(x, y, w);
}

MeanValueGap subharmonic_gap(const std::vector<double>& nu_boundary, double nu_at_k0,
                             const HarmonicMeasureEstimate& omega) {
  require(nu_boundary.size() == omega.bins(), ErrorKind::Parameter,
          "subharmonic_test: nu values are not aligned with the harmonic-measure bins");
  double m1 = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < nu_boundary.size(); ++i) {
    if (omega.masses[i] == 0.0) continue;
    m1 += omega.masses[i] * nu_boundary[i];
    m2 += omega.masses[i] * nu_boundary[i] * nu_boundary[i];
  }
  MeanValueGap g;
  g.gap = m1 - nu_at_k0;
  g.error = std::sqrt(std::max(0.0, m2 - m1 * m1) / static_cast<double>(omega.n_walkers));
  return g;
}

double subharmonic_test(const std::vector<double>& nu_boundary, double nu_at_k0,
                        const HarmonicMeasureEstimate& omega) {
  return subharmonic_gap(nu_boundary, nu_at_k0, omega).gap;
}

double entropy_lower_bound(const std::vector<double>& densities, const HarmonicMeasureEstimate& omega) {
  require(static_cast<int>(densities.size()) == omega.bins_per_edge, ErrorKind::Parameter,
          "entropy_lower_bound: one density per base bin is required");
  double s = 0.0;
  bool zero = false;
  for (std::size_t i = 0; i < densities.size(); ++i) {
    if (densities[i] < 0.0) throw Error(ErrorKind::Data, "entropy_lower_bound: negative density");
    if (densities[i] == 0.0) {
      zero = true;
      continue;
    }
    s += omega.masses[i] * std::log(densities[i]);
  }
  return zero ? -std::numeric_limits<double>::infinity() : s;
}

Complex pick_k0(const FieldSpec& f, const TriangleDomain& T, const PickK0Options& opt) {
  T.validate();
  const FreeAmplitude amp(f);
  if (amp.zero()) throw Error(ErrorKind::DegenerateSource, "pick_k0: the source vanishes");
  const SphereRule& rule = sphere_rule(opt.n_theta, opt.n_phi);
  const double H = T.apex().imag();
  const double slope = 1.0 / std::tan(pi / T.gamma1);
  std::vector<Complex> pts;
  std::vector<double> norms;
  double sup = 0.0;
  for (int i = 0; i < opt.rows; ++i) {
    const double y = H * (opt.rows - i) / (opt.rows + 1.0);
    const double xl = T.a1 + y * slope, xr = T.a2 - y * slope;
    for (int j = 0; j < opt.cols; ++j) {
      const Complex z(xl + (xr - xl) * (j + 1.0) / (opt.cols + 1.0), y);
      pts.push_back(z);
      norms.push_back(amp.norm(z, rule));
      sup = std::max(sup, norms.back());
    }
  }
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (sup > 0.0 && norms[i] > opt.threshold * sup) return pts[i];
  throw Error(ErrorKind::DegenerateSource, "pick_k0: no interior point with a nonzero amplitude");
}

EntropyCertificate entropy_certificate(const std::function<double(Complex)>& amplitude_norm,
                                       const TriangleDomain& T, Complex k0, long n_walkers,
                                       std::uint64_t seed, const HarmonicMeasureOptions& opt) {
  const HarmonicMeasureEstimate omega = harmonic_measure(T, k0, n_walkers, seed, opt);
  EntropyCertificate c;
  c.triangle = T;
  c.k0 = k0;
  c.seed = seed;
  c.n_walkers = n_walkers;
  c.bins_per_edge = opt.bins_per_edge;
  for (std::size_t i = 0; i < omega.bins(); ++i) {
    const Complex s = omega.bin_center(i);
    const double a = amplitude_norm(s);
    c.nu.push_back(std::log(a));
    if (omega.edge_of(i) == 0) {
      const double k = s.real();
      c.densities.push_back(k / pi * a * a);
      c.zero_density = c.zero_density || a == 0.0;
    }
  }
  c.nu_k0 = std::log(amplitude_norm(k0));
  const MeanValueGap g = subharmonic_gap(c.nu, c.nu_k0, omega);
  c.mean_value_gap = g.gap;
  c.gap_stderr = g.error;
  c.entropy_integral = entropy_lower_bound(c.densities, omega);
  return c;
}

EntropyCertificate free_entropy_certificate(const FieldSpec& f, const TriangleDomain& T, Complex k0,
                                            long n_walkers, std::uint64_t seed,
                                            const HarmonicMeasureOptions& opt, int n_theta, int n_phi) {
  const FreeAmplitude amp(f);
  if (amp.zero()) throw Error(ErrorKind::DegenerateSource, "free_entropy_certificate: the source vanishes");
  const SphereRule& rule = sphere_rule(n_theta, n_phi);
  return entropy_certificate([&](Complex k) { return amp.norm(k, rule); }, T, k0, n_walkers, seed, opt);
}

}  // namespace greenlab
