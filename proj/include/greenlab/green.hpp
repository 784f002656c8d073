#pragma once

#include <optional>

#include "greenlab/quadrature.hpp"

namespace greenlab {

// Free kernel e^{ik|x−y|}/(4π|x−y|).
template <typename DerivedX, typename DerivedY>
std::complex<typename DerivedX::Scalar> free_green(const Eigen::MatrixBase<DerivedX>& x,
                                                   const Eigen::MatrixBase<DerivedY>& y,
                                                   const ComplexWavenumber& k) {
  using S = typename DerivedX::Scalar;
  const S r = (x - y).norm();
  require(r > S(0), ErrorKind::Singularity, "free_green: x == y");
  const std::complex<S> ik(-S(k.delta), S(k.tau));
  return std::exp(ik * r) / (S(4) * S(pi) * r);
}

// e^{ikr}/(4π), the free kernel times r.
inline Complex free_green_regular(double r, const ComplexWavenumber& k) {
  return std::exp(Complex(-k.delta, k.tau) * r) / (4.0 * pi);
}

// A function f fed to B(k). When `singular_at` is set, `value` returns the
// regular part g(w) = f(w)|w − c|. The envelope |f(w)| <= bound·e^{−decay|w|}
// (with a 1/|w−c| factor when singular) is needed if Q is not compactly supported.
struct SourceFunction {
  std::function<Complex(const Point3&)> value;
  std::optional<Point3> singular_at;
  std::optional<double> decay;
  double bound = 1.0;
  bool zero = false;

  static SourceFunction free_green_source(const ComplexWavenumber& k, const Point3& y);
  static SourceFunction smooth(std::function<Complex(const Point3&)> f,
                               std::optional<double> decay = std::nullopt, double bound = 1.0);
};

struct ApplyBResult {
  Complex value{};
  Complex near{}, shifted{}, upsilon{};  // contributions split by RegionTag of the node
  double error = 0.0;
  long nodes = 0;
  double s_max = 0.0;
};

// (B(k)f)(x) = ∫ G⁰(x,w) div Q(w) f(w) dw on a two-centre rule with foci x and
// the singular point of f (or the support centre of Q).
ApplyBResult apply_B(const ComplexWavenumber& k, const FieldSpec& Q, const SourceFunction& f,
                     const Point3& x, const QuadratureSpec& spec = {});

}  // namespace greenlab
