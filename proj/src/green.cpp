#include "greenlab/green.hpp"

namespace greenlab {

SourceFunction SourceFunction::free_green_source(const ComplexWavenumber& k, const Point3& y) {
  SourceFunction s;
  s.value = [k, y](const Point3& w) { return free_green_regular((w - y).norm(), k); };
  s.singular_at = y;
  s.decay = k.delta;
  s.bound = std::exp(k.delta * y.norm()) / (4.0 * pi);
  return s;
}

SourceFunction SourceFunction::smooth(std::function<Complex(const Point3&)> f,
                                      std::optional<double> decay, double bound) {
  SourceFunction s;
  s.value = std::move(f);
  s.decay = decay;
  s.bound = bound;
  return s;
}

namespace {

// s beyond which the integrand tail is below tol, for the bound
// (m M e^{decay|b|}/2) e^{−λ s}(s/λ + 1/λ²).
double damped_s_max(double lambda, double scale, double d, double tol) {
  auto tail = [&](double s) { return 0.5 * scale * std::exp(-lambda * s) * (s / lambda + 1.0 / (lambda * lambda)); };
  double s = std::max(2.0 * d, 1.0 / lambda);
  while (tail(s) > tol) s *= 1.5;
  return s;
}

}  // namespace

ApplyBResult apply_B(const ComplexWavenumber& k, const FieldSpec& Q, const SourceFunction& f,
                     const Point3& x, const QuadratureSpec& spec) {
  spec.validate();
  require(Q.is_vector(), ErrorKind::Parameter, "apply_B: Q must be a vector field");
  ApplyBResult res;
  if (Q.zero || f.zero) return res;
  require(k.delta > 0 || Q.compact(), ErrorKind::Precondition,
          "apply_B: real k needs a compactly supported Q");

  const Point3 b = f.singular_at ? *f.singular_at
                                 : (Q.support ? Q.support->center : Point3::Zero().eval());
  double s_max = std::numeric_limits<double>::infinity();
  if (!Q.compact()) {
    require(f.decay.has_value(), ErrorKind::Precondition,
            "apply_B: source envelope missing for a non-compact Q");
    const double lambda = std::min(k.delta, *f.decay);
    require(lambda > 0, ErrorKind::Precondition, "apply_B: source envelope must decay");
    const double mV = std::max(Q.envelope.m, 1e-300);
    s_max = damped_s_max(lambda, mV * f.bound * std::exp(*f.decay * b.norm()), (x - b).norm(),
                         spec.truncation_tol);
  }
  res.s_max = s_max;

  const bool singular = f.singular_at.has_value();
  const double xn = x.norm();
  auto integrand = [&](const Point3& w, Complex& near, Complex& shifted, Complex& ups) {
    const double rx = (x - w).norm();
    Complex g = f.value(w);
    if (!singular) g *= (w - b).norm();
    const Complex v = free_green_regular(rx, k) * Q.divergence(w) * g;
    if (xn > 1.0) {
      if (in_region(RegionTag::Near, w, x)) near += v;
      else if (in_region(RegionTag::Shifted, w, x)) shifted += v;
      else ups += v;
    } else {
      near += v;
    }
  };

  TwoCenterOptions base;
  base.n_mu = spec.n_radial;
  base.n_nu = spec.n_theta;
  base.n_phi = spec.n_phi;
  if (!Q.compact()) base.mu_panels = std::max(base.mu_panels, static_cast<int>(std::ceil(std::log2(s_max))));
  NodeSet nodes;
  Complex prev{};
  double err = 0.0;
  long total = 0;
  for (int level = 0; level <= std::max(1, spec.max_refinements); ++level) {
    two_center_nodes(x, b, s_max, Q.support, base.refined(1 << level), nodes);
    Complex n{}, s{}, u{};
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      Complex a{}, c{}, d{};
      integrand(nodes.p[i], a, c, d);
      n += nodes.w[i] * a;
      s += nodes.w[i] * c;
      u += nodes.w[i] * d;
    }
    total += static_cast<long>(nodes.size());
    const Complex value = n + s + u;
    if (level > 0) {
      err = std::abs(value - prev);
      if (err <= spec.tol * std::max(1.0, std::abs(value))) {
        res.value = value;
        res.near = n;
        res.shifted = s;
        res.upsilon = u;
        res.error = err;
        res.nodes = total;
        return res;
      }
    }
    prev = value;
  }
  throw AccuracyError("apply_B: quadrature did not converge", err);
}

}  // namespace greenlab
