#include "doctest.h"

#include "greenlab/eikonal.hpp"
#include "greenlab/potentials.hpp"

using namespace greenlab;

namespace {

// G applied to the unit-ball indicator; the angular integral is elementary and
// the |x| dependence cancels.
double indicator_G(double k) { return (1.0 - (1.0 - std::exp(-2.0 * k)) / (2.0 * k)) / (2.0 * k); }

PhaseGridSpec small_grid() {
  PhaseGridSpec s;
  s.n_r = 8;
  s.r_max = 8.0;
  s.n_theta = 4;
  s.n_phi = 4;
  s.quad = GQuadrature{6, 6, 6, 40.0};
  return s;
}

}  // namespace

TEST_CASE("apply_G") {
  const FieldSpec ind = unit_ball_indicator();
  auto f = [&](const Point3& y) { return ind.value(y); };
  const Point3 x(0.6, -1.2, 2.0);
  CHECK(apply_G(5.0, [](const Point3&) { return 0.0; }, x).value == 0.0);

  for (double k : {5.0, 8.0}) {
    const ApplyGResult g = apply_G(k, f, x, {}, ind.support);
    CHECK(g.value > 0.0);
    CHECK(std::abs(g.value - indicator_G(k)) < 1e-6 * indicator_G(k));
    CHECK(g.max_prefactor <= x.norm() * (1.0 + 1e-12));
    const double fine = apply_G(k, f, x, GQuadrature{}.refined(4), ind.support).value;
    CHECK(std::abs(g.value - fine) < 1e-6 * fine);
  }
  CHECK(apply_G(5.0, f, Point3(0, 0, 7.5), {}, ind.support).value ==
        doctest::Approx(indicator_G(5.0)).epsilon(1e-6));

  const FieldSpec gs = gaussian_scalar(1.0), narrow = gaussian_scalar(1.0, 0.7);
  auto g1 = [&](const Point3& y) { return gs.value(y); };
  auto g2 = [&](const Point3& y) { return narrow.value(y); };
  auto g3 = [&](const Point3& y) { return 2.0 * gs.value(y) - 3.0 * narrow.value(y); };
  const double a = apply_G(6.0, g1, x).value, b = apply_G(6.0, g2, x).value;
  CHECK(apply_G(6.0, g3, x).value == doctest::Approx(2 * a - 3 * b).epsilon(1e-12));

  CHECK_THROWS_AS(apply_G(0.0, f, x), Error);
  CHECK_THROWS_AS(apply_G(5.0, f, Point3(0, 0, 0.5)), Error);
}

TEST_CASE("Picard iteration for the phase") {
  const PhaseGridSpec spec = small_grid();
  const PhaseCorrection z = picard_iterate_mu(FieldSpec::zero_scalar(), 5.0, 2, spec);
  CHECK(z.values().cwiseAbs().maxCoeff() == 0.0);

  const FieldSpec V = gaussian_scalar(1.0);
  const PhaseCorrection mu = picard_iterate_mu(V, 5.0, 3, spec);
  const PhaseGrid& grid = mu.grid;
  for (int i : {0, 3, 7}) {
    const Point3 p = grid.point(i, 1, 2);
    const double gv = apply_G(5.0, [&](const Point3& y) { return V.value(y); }, p, spec.quad).value;
    CHECK(mu.iterates[1][grid.index(i, 1, 2)] == doctest::Approx(-gv).epsilon(1e-12));
  }
  CHECK(mu.contraction_ratio(1) < 0.1);
  CHECK(mu.contraction_ratio(2) < 0.1);
  CHECK_THROWS_AS(picard_iterate_mu(V, 4.0, 2, spec), Error);
  PhaseGridSpec odd = spec;
  odd.n_phi = 5;
  CHECK_THROWS_AS(picard_iterate_mu(V, 5.0, 1, odd), Error);
}

TEST_CASE("eikonal residual") {
  PhaseGridSpec spec;
  spec.n_r = 6;
  spec.n_theta = 5;
  spec.n_phi = 6;

  SUBCASE("zero phase leaves the potential") {
    const FieldSpec V = gaussian_scalar(2.0);
    PhaseCorrection mu{5.0, PhaseGrid(spec), {}, {}};
    mu.iterates.push_back(Eigen::VectorXd::Zero(mu.grid.size()));
    double expected = 0.0;
    for (int i = 1; i + 1 < spec.n_r; ++i)
      for (int j = 0; j < spec.n_theta; ++j)
        for (int l = 0; l < spec.n_phi; ++l) expected = std::max(expected, V.value(mu.grid.point(i, j, l)));
    CHECK(eikonal_residual(mu, V, 5.0) == doctest::Approx(expected).epsilon(1e-14));
  }

  SUBCASE("second-order differences") {
    // m = cos θ / r² is harmonic, so V = |∇m|² − (2k + 2/r)∂_r m solves the equation exactly.
    const double k = 5.0;
    auto m = [](const Point3& x) { return x.z() / std::pow(x.norm(), 3); };
    const FieldSpec V = FieldSpec::scalar([k](const Point3& x) {
      const double r = x.norm(), c = x.z() / r;
      const double dr = -2.0 * c / (r * r * r);
      return (3.0 * c * c + 1.0) / std::pow(r, 6) - (2.0 * k + 2.0 / r) * dr;
    });
    auto residual = [&](int scale) {
      PhaseGridSpec s = spec;
      s.n_r = 12 * scale;
      s.r_min = 1.5;
      s.r_max = 6.0;
      s.n_theta = 8 * scale;
      s.n_phi = 8 * scale;
      PhaseCorrection mu{k, PhaseGrid(s), {}, {}};
      mu.iterates.push_back(mu.grid.sample(m));
      return eikonal_residual(mu, V, k);
    };
    const double coarse = residual(1), fine = residual(2);
    CHECK(fine < coarse);
    CHECK(coarse / fine == doctest::Approx(4.0).epsilon(0.15));
  }

  SUBCASE("coarse grids are rejected") {
    PhaseGridSpec s = spec;
    s.n_theta = 4;
    PhaseCorrection mu{5.0, PhaseGrid(s), {}, {}};
    mu.iterates.push_back(Eigen::VectorXd::Zero(mu.grid.size()));
    CHECK_THROWS_AS(eikonal_residual(mu, FieldSpec::zero_scalar(), 5.0), Error);
  }
}
