#include "greenlab/potentials.hpp"

#include "greenlab/cutoff.hpp"

namespace greenlab {

double bump_profile(double r) {
  if (r >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - r * r));
}

double bump_profile_derivative(double r) {
  if (r >= 1.0) return 0.0;
  const double u = 1.0 - r * r;
  return bump_profile(r) * (-2.0 * r / (u * u));
}

double bump_profile_laplacian(double r) {
  if (r >= 1.0) return 0.0;
  const double u = 1.0 - r * r;
  const double u2 = u * u;
  return bump_profile(r) * (4.0 * r * r / (u2 * u2) - 6.0 / u2 - 8.0 * r * r / (u2 * u));
}

void measure_envelope(FieldSpec& F, double eps) {
  F.envelope.eps = eps;
  F.envelope.m = estimate_decay_envelope(F, eps, default_envelope_radii());
}

FieldSpec bump_scalar(double amplitude, const Point3& center, double radius) {
  require(radius > 0, ErrorKind::Parameter, "bump radius must be positive");
  FieldSpec f = FieldSpec::scalar(
      [=](const Point3& x) { return amplitude * bump_profile((x - center).norm() / radius); },
      "bump");
  f.support = SupportBall{center, radius};
  f.zero = amplitude == 0.0;
  measure_envelope(f, 0.5);
  return f;
}

FieldSpec bump_vector_field(double eta, const Point3& direction, const Point3& center,
                            double radius) {
  require(radius > 0, ErrorKind::Parameter, "bump radius must be positive");
  const Point3 d = direction.normalized();
  FieldSpec f = FieldSpec::vector(
      [=](const Point3& x) { return (eta * bump_profile((x - center).norm() / radius) * d).eval(); },
      [=](const Point3& x) {
        const Point3 y = x - center;
        const double r = y.norm();
        if (r == 0.0 || r >= radius) return 0.0;
        return eta * bump_profile_derivative(r / radius) / radius * y.dot(d) / r;
      },
      "bump-field");
  f.support = SupportBall{center, radius};
  f.zero = eta == 0.0;
  measure_envelope(f, 0.5);
  return f;
}

FieldSpec gaussian_scalar(double amplitude, double width) {
  require(width > 0, ErrorKind::Parameter, "gaussian width must be positive");
  FieldSpec f = FieldSpec::scalar(
      [=](const Point3& x) { return amplitude * std::exp(-x.squaredNorm() / (width * width)); },
      "gaussian");
  f.zero = amplitude == 0.0;
  measure_envelope(f, 0.5);
  return f;
}

FieldSpec gaussian_gradient_field(double amplitude) {
  FieldSpec f = FieldSpec::vector(
      [=](const Point3& x) { return (-2.0 * amplitude * std::exp(-x.squaredNorm()) * x).eval(); },
      [=](const Point3& x) {
        const double r2 = x.squaredNorm();
        return amplitude * (4.0 * r2 - 6.0) * std::exp(-r2);
      },
      "gaussian-gradient");
  f.zero = amplitude == 0.0;
  measure_envelope(f, 0.5);
  return f;
}

FieldSpec unit_ball_indicator() {
  FieldSpec f = FieldSpec::scalar([](const Point3& x) { return x.squaredNorm() < 1.0 ? 1.0 : 0.0; },
                                  "unit-ball-indicator");
  f.support = SupportBall{Point3::Zero(), 1.0};
  measure_envelope(f, 0.5);
  return f;
}

Example1Fields build_example1(double gamma, double eps) {
  require(gamma > 0.25, ErrorKind::Parameter, "build_example1: gamma must exceed 1/4");
  const double g = gamma;
  auto rho = [g](const Point3& x) { return std::pow(1.0 + x.squaredNorm(), -g); };
  auto d1rho = [g](const Point3& x) {
    return -2.0 * g * x.x() * std::pow(1.0 + x.squaredNorm(), -g - 1.0);
  };
  Example1Fields out;
  out.Q = FieldSpec::vector(
      [rho](const Point3& x) { return Point3(-std::cos(x.x()) * rho(x), 0.0, 0.0); },
      [rho, d1rho](const Point3& x) {
        return std::sin(x.x()) * rho(x) - std::cos(x.x()) * d1rho(x);
      },
      "example1-Q");
  out.V2 = FieldSpec::scalar([d1rho](const Point3& x) { return std::cos(x.x()) * d1rho(x); },
                             "example1-V2");
  out.V = FieldSpec::scalar([rho](const Point3& x) { return std::sin(x.x()) * rho(x); },
                            "example1-V");
  measure_envelope(out.Q, eps);
  measure_envelope(out.V2, eps);
  measure_envelope(out.V, eps);
  return out;
}

FieldSpec build_proposition_potential(const FieldSpec& Q, double gamma) {
  require(std::abs(gamma) <= 1.0, ErrorKind::Parameter,
          "build_proposition_potential: |gamma| must not exceed 1");
  require(Q.is_vector(), ErrorKind::Parameter, "build_proposition_potential: Q must be a vector field");
  if (Q.zero) return FieldSpec::zero_scalar();
  FieldSpec V = FieldSpec::scalar(
      [Q, gamma](const Point3& x) { return gamma * Q.divergence(x) + Q.vec(x).squaredNorm(); },
      "proposition-V");
  V.support = Q.support;
  measure_envelope(V, Q.envelope.eps);
  return V;
}

CutoffSplit make_cutoff_split(const FieldSpec& Q, double R) {
  require(R > 0, ErrorKind::Parameter, "cutoff radius must be positive");
  require(Q.is_vector(), ErrorKind::Parameter, "cutoff split needs a vector field");
  CutoffSplit s;
  s.R = R;
  FieldSpec::ScalarFn div1, div2;
  if (Q.has_analytic_divergence()) {
    div1 = [Q, R](const Point3& x) {
      return eval_cutoff(x, R) * Q.divergence(x) + cutoff_gradient(x, R).dot(Q.vec(x));
    };
    div2 = [Q, R](const Point3& x) {
      return (1.0 - eval_cutoff(x, R)) * Q.divergence(x) - cutoff_gradient(x, R).dot(Q.vec(x));
    };
  }
  s.Q1 = FieldSpec::vector([Q, R](const Point3& x) { return (eval_cutoff(x, R) * Q.vec(x)).eval(); },
                           div1, "chi_R Q");
  s.Q2 = FieldSpec::vector(
      [Q, R](const Point3& x) { return ((1.0 - eval_cutoff(x, R)) * Q.vec(x)).eval(); }, div2,
      "(1-chi_R) Q");
  s.Q1.fd_step = s.Q2.fd_step = Q.fd_step;
  s.Q1.support = SupportBall{Point3::Zero(), R + 1.0};
  if (Q.support) {
    s.Q1.support = SupportBall{Point3::Zero(),
                               std::min(R + 1.0, Q.support->center.norm() + Q.support->radius)};
    if (Q.support->center.norm() + Q.support->radius <= R) {
      s.Q2 = FieldSpec::zero_vector();
    } else {
      s.Q2.support = Q.support;
    }
  }
  s.Q1.zero = Q.zero;
  s.Q1.envelope = Q.envelope;
  if (!s.Q2.zero) {
    // The envelope grid only samples dyadic radii, so Q₂ near the taper is
    // bounded by Q's own envelope.
    s.Q2.envelope = Q.envelope;
  }
  return s;
}

}  // namespace greenlab
