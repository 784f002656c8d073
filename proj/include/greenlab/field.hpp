#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "greenlab/geometry.hpp"

namespace greenlab {

// |F(x)| <= m / (1 + |x|^{0.5 + eps})
struct DecayEnvelope {
  double m = 0.0;
  double eps = 0.5;

  double bound(const Point3& x) const { return m / (1.0 + std::pow(x.norm(), 0.5 + eps)); }
  bool holds(double magnitude, const Point3& x) const {
    return magnitude <= bound(x) * (1.0 + 1e-12) + 1e-300;
  }
};

struct SupportBall {
  Point3 center = Point3::Zero();
  double radius = 0.0;

  bool contains(const Point3& x) const { return (x - center).norm() < radius; }
};

// A scalar potential V or a vector field Q. Evaluation is a pure function of
// the point; all closures capture their parameters by value.
struct FieldSpec {
  enum class Kind { Scalar, Vector3 };
  using ScalarFn = std::function<double(const Point3&)>;
  using VectorFn = std::function<Point3(const Point3&)>;

  Kind kind = Kind::Scalar;
  ScalarFn scalar_fn;
  VectorFn vector_fn;
  ScalarFn divergence_fn;  // analytic divergence, vector fields only
  DecayEnvelope envelope;
  double fd_step = 1e-3;
  std::optional<SupportBall> support;
  bool zero = false;
  std::string name;

  static FieldSpec scalar(ScalarFn f, std::string name = {});
  static FieldSpec vector(VectorFn f, ScalarFn divergence = {}, std::string name = {});
  static FieldSpec zero_scalar();
  static FieldSpec zero_vector();

  bool is_vector() const { return kind == Kind::Vector3; }
  bool has_analytic_divergence() const { return static_cast<bool>(divergence_fn); }
  bool compact() const { return support.has_value(); }

  double value(const Point3& x) const;
  Point3 vec(const Point3& x) const;
  double magnitude(const Point3& x) const;

  // Analytic divergence when available, otherwise central differences with fd_step.
  double divergence(const Point3& x) const;
  double fd_divergence(const Point3& x, double h) const;

  // Scalar field V = div Q sharing this field's support.
  FieldSpec divergence_field() const;
  FieldSpec scaled(double eta) const;
};

// 26 cube directions crossed with these radii define the reproducible
// envelope grid: {0, 1/16, 1/8, 1/4, 1/2, 1, 2, ..., 256}.
std::vector<double> default_envelope_radii();

// sup over directions x radii of |F(x)| (1 + |x|^{0.5+eps}).
double estimate_decay_envelope(const FieldSpec& F, double eps, const std::vector<double>& radii,
                               const std::vector<Point3>& directions = cube_directions());

}  // namespace greenlab
