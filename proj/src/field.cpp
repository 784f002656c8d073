#include "greenlab/field.hpp"

namespace greenlab {

FieldSpec FieldSpec::scalar(ScalarFn f, std::string name) {
  FieldSpec s;
  s.kind = Kind::Scalar;
  s.scalar_fn = std::move(f);
  s.name = std::move(name);
  return s;
}

FieldSpec FieldSpec::vector(VectorFn f, ScalarFn divergence, std::string name) {
  FieldSpec s;
  s.kind = Kind::Vector3;
  s.vector_fn = std::move(f);
  s.divergence_fn = std::move(divergence);
  s.name = std::move(name);
  return s;
}

FieldSpec FieldSpec::zero_scalar() {
  FieldSpec s = scalar([](const Point3&) { return 0.0; }, "zero");
  s.zero = true;
  s.support = SupportBall{Point3::Zero(), 0.0};
  return s;
}

FieldSpec FieldSpec::zero_vector() {
  FieldSpec s = vector([](const Point3&) { return Point3::Zero().eval(); },
                       [](const Point3&) { return 0.0; }, "zero");
  s.zero = true;
  s.support = SupportBall{Point3::Zero(), 0.0};
  return s;
}

double FieldSpec::value(const Point3& x) const {
  require(kind == Kind::Scalar, ErrorKind::Parameter, "value() on a vector field");
  return scalar_fn(x);
}

Point3 FieldSpec::vec(const Point3& x) const {
  require(kind == Kind::Vector3, ErrorKind::Parameter, "vec() on a scalar field");
  return vector_fn(x);
}

double FieldSpec::magnitude(const Point3& x) const {
  return kind == Kind::Scalar ? std::abs(scalar_fn(x)) : vector_fn(x).norm();
}

double FieldSpec::fd_divergence(const Point3& x, double h) const {
  require(kind == Kind::Vector3, ErrorKind::Parameter, "divergence of a scalar field");
  require(h > 0, ErrorKind::Parameter, "fd step must be positive");
  double d = 0.0;
  for (int i = 0; i < 3; ++i) {
    Point3 xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    d += (vector_fn(xp)[i] - vector_fn(xm)[i]) / (2.0 * h);
  }
  return d;
}

double FieldSpec::divergence(const Point3& x) const {
  if (zero) return 0.0;
  if (divergence_fn) return divergence_fn(x);
  return fd_divergence(x, fd_step);
}

FieldSpec FieldSpec::divergence_field() const {
  require(kind == Kind::Vector3, ErrorKind::Parameter, "divergence of a scalar field");
  if (zero) return zero_scalar();
  FieldSpec self = *this;
  FieldSpec v = scalar([self](const Point3& x) { return self.divergence(x); },
                       name.empty() ? "div Q" : "div(" + name + ")");
  v.support = support;
  v.fd_step = fd_step;
  v.envelope.eps = envelope.eps;
  return v;
}

FieldSpec FieldSpec::scaled(double eta) const {
  FieldSpec s = *this;
  if (kind == Kind::Scalar) {
    s.scalar_fn = [f = scalar_fn, eta](const Point3& x) { return eta * f(x); };
  } else {
    s.vector_fn = [f = vector_fn, eta](const Point3& x) { return (eta * f(x)).eval(); };
    if (divergence_fn)
      s.divergence_fn = [f = divergence_fn, eta](const Point3& x) { return eta * f(x); };
  }
  s.envelope.m = std::abs(eta) * envelope.m;
  s.zero = zero || eta == 0.0;
  return s;
}

std::vector<double> default_envelope_radii() {
  std::vector<double> r = {0.0, 1.0 / 16, 1.0 / 8, 1.0 / 4, 1.0 / 2};
  for (double x = 1.0; x <= 256.0; x *= 2.0) r.push_back(x);
  return r;
}

double estimate_decay_envelope(const FieldSpec& F, double eps, const std::vector<double>& radii,
                               const std::vector<Point3>& directions) {
  require(!radii.empty() && !directions.empty(), ErrorKind::Parameter,
          "estimate_decay_envelope: empty sample");
  require(eps > 0, ErrorKind::Parameter, "estimate_decay_envelope: eps must be positive");
  double m = 0.0;
  for (double r : radii) {
    const double w = 1.0 + std::pow(r, 0.5 + eps);
    for (const Point3& d : directions) m = std::max(m, F.magnitude(r * d) * w);
  }
  return m;
}

}  // namespace greenlab
