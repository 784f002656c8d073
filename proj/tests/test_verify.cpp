#include "doctest.h"

#include "greenlab/potentials.hpp"
#include "greenlab/verify.hpp"

using namespace greenlab;

namespace {

// ∫ e^{−δD} D dD.
double F(double w, double d) { return -std::exp(-d * w) * (w / d + 1.0 / (d * d)); }

// Plain sphere integral of e^{−δ(|x−y|+ρ)} with x on an axis.
double sphere_oracle(double d, double rho, double x) {
  return 2.0 * pi * rho / x * std::exp(-d * rho) * (F(x + rho, d) - F(x - rho, d));
}

// Focal-coordinate form with the s integral done in closed form and Simpson in t.
double upsilon_oracle(double d, double x) {
  const double c2 = 4.0 * x / 3.0;
  auto inner = [&](double t) {
    const double a = c2 + t;
    return std::exp(-d * a) * (a * a / d + 2.0 * a / (d * d) + 2.0 / (d * d * d) - t * t / d);
  };
  const int n = 4000;
  const double h = x / n;
  double s = inner(0.0) + inner(x);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * inner(i * h);
  return 2.0 * (s * h / 3.0) * 2.0 * pi / (8.0 * x);
}

}  // namespace

TEST_CASE("sphere bound sweep") {
  const BoundSweepReport one = lemma1_sweep({0.5}, {2.0}, {10.0});
  REQUIRE(one.bounds.size() == 3);
  CHECK(one.bounds[0].samples[0].lhs == doctest::Approx(sphere_oracle(0.5, 2.0, 10.0)).epsilon(1e-9));
  // 0 ≤ ζ ≤ π.
  CHECK(one.bounds[1].samples[0].lhs < pi * one.bounds[0].samples[0].lhs);
  CHECK(one.bounds[2].samples[0].lhs < pi * one.bounds[1].samples[0].lhs);

  const BoundSweepReport rep = lemma1_default_sweep();
  CHECK(rep.pass);
  for (const BoundSeries& s : rep.bounds) {
    CHECK(s.spread_x <= 2.0);
    CHECK(s.spread_rho <= 2.0);
    for (const BoundSample& b : s.samples) CHECK(b.lhs < s.C * b.shape * (1 + 1e-12));
  }
  CHECK_THROWS_AS(lemma1_sweep({0.5}, {4.0}, {6.0}), Error);
  CHECK_THROWS_AS(lemma1_sweep({0.5}, {1.0}, {6.0}), Error);
  CHECK_THROWS_AS(lemma1_sweep({0.0}, {2.0}, {6.0}), Error);
}

TEST_CASE("exterior bound sweep") {
  const QuadratureSpec q = LemmaSweepOptions{}.quad;
  for (double d : {0.1, 0.5, 1.0})
    for (double x : {4.0, 16.0}) CHECK(lemma2_lhs(d, x, q) == doctest::Approx(upsilon_oracle(d, x)).epsilon(1e-9));
  double prev = std::numeric_limits<double>::infinity();
  for (double x : {2.0, 4.0, 8.0, 16.0}) {
    const double v = lemma2_lhs(0.35, x, q);
    CHECK(v < prev);
    prev = v;
  }
  const BoundSweepReport rep = lemma2_sweep({0.1, 0.2, 0.35, 0.5, 0.75, 1.0}, {4.0, 8.0, 16.0});
  CHECK(rep.pass);
  CHECK(rep.gamma_fit > 1.0);
  CHECK(rep.r2 > 0.99);
  CHECK_THROWS_AS(lemma2_lhs(0.5, 0.5, q), Error);
}

TEST_CASE("Dirac factorization") {
  const TestFunction psi = gaussian_test_function(1.0);
  CHECK(psi.laplacian(Point3::Zero()) == doctest::Approx(-6.0));

  const DiracReport free = dirac_factorization_check(FieldSpec::zero_vector(), 0.25, psi);
  CHECK(free.offdiag < 1e-12);
  CHECK(free.unitary_error < 1e-15);

  const FieldSpec v = gaussian_gradient_field(0.5);
  const DiracReport coarse = dirac_factorization_check(v, 0.2, psi);
  const DiracReport fine = dirac_factorization_check(v, 0.1, psi);
  CHECK(coarse.deviation / fine.deviation == doctest::Approx(4.0).epsilon(0.15));
  CHECK(coarse.offdiag / fine.offdiag == doctest::Approx(4.0).epsilon(0.15));
  const Eigen::Matrix4cd U = dirac_U();
  CHECK((U * U.adjoint() - Eigen::Matrix4cd::Identity()).norm() < 1e-15);

  CHECK_THROWS_AS(dirac_factorization_check(v, 2.0, psi), Error);
  CHECK_THROWS_AS(dirac_factorization_check(gaussian_scalar(1.0), 0.2, psi), Error);
}

TEST_CASE("sign laws") {
  CHECK(sign_moment(SignLaw::Rademacher, 2) == 1.0);
  CHECK(sign_moment(SignLaw::Uniform, 4) == doctest::Approx(0.2));
  const int n = 20000;
  for (SignLaw law : {SignLaw::Rademacher, SignLaw::Uniform}) {
    double cross = 0.0, sq = 0.0, mean = 0.0;
    for (int r = 0; r < n; ++r) {
      const std::uint64_t s = realization_seed(11, r);
      const double a = anderson_sign(law, s, 0), b = anderson_sign(law, s, 1);
      cross += a * b;
      sq += a * a;
      mean += a;
    }
    const double m2 = sign_moment(law, 2);
    CHECK(std::abs(cross / n) < 4.0 * m2 / std::sqrt(n));
    CHECK(std::abs(mean / n) < 4.0 * std::sqrt(m2 / n));
    CHECK(sq / n == doctest::Approx(m2).epsilon(0.02));
  }
}

TEST_CASE("Anderson decay statistics") {
  AndersonPotentialSpec zero = lattice_anderson_spec(60.0, 0.25);
  std::fill(zero.amplitudes.begin(), zero.amplitudes.end(), 0.0);
  CHECK(anderson_decay_stats(zero, 50, 1).undefined);

  const AndersonPotentialSpec spec = lattice_anderson_spec(100.0, 0.25);
  CHECK_THROWS_AS(anderson_decay_stats(spec, 20, 1), Error);

  const AndersonStatsReport rep = anderson_decay_stats(spec, 100, 7);
  CHECK_FALSE(rep.undefined);
  CHECK(rep.odd_moments_vanish);
  CHECK(rep.max_abs_z < 3.5);
  CHECK(rep.decay_exponent >= 1.0 + 2.0 * 0.25 - 0.1);
  CHECK(rep.decay.r2 > 0.99);
  for (std::size_t i = 0; i < rep.radii.size(); ++i)
    CHECK(std::abs(rep.mean_sq[i] - rep.exact_sq[i]) < 4.0 * rep.mean_sq_stderr[i]);

  const std::vector<Point3> pts = lattice_sample_points({4, 8, 16, 32, 64});
  const MomentReport p1 = moment_bound_check(spec, 1, pts, 100, 7);
  CHECK(std::abs(p1.exponent - rep.decay_exponent) < 0.1);
  CHECK(p1.target == doctest::Approx(1.5));
  const MomentReport p2 = moment_bound_check(spec, 2, pts, 100, 7);
  CHECK(p2.exponent >= 2.6);
  for (std::size_t i = 0; i < pts.size(); ++i)
    CHECK(std::abs(p2.empirical[i] - p2.exact[i]) < 5.0 * p2.standard_error[i]);
  CHECK_THROWS_AS(moment_bound_check(spec, 3, pts, 100, 7), Error);
}
