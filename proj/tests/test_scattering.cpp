#include "doctest.h"

#include <random>

#include "greenlab/harmonic.hpp"
#include "greenlab/potentials.hpp"
#include "greenlab/scattering.hpp"

using namespace greenlab;

namespace {

double indicator_amplitude(double k) { return (std::sin(k) - k * std::cos(k)) / (k * k * k); }

const std::vector<double> extraction_radii = {6, 8, 10, 12, 16, 20, 24, 32};

}  // namespace

TEST_CASE("free amplitude closed forms") {
  const FieldSpec f = unit_ball_indicator();
  const Point3 th = Point3(1, 2, 2) / 3.0;
  CHECK(std::abs(free_amplitude(f, 0.0, th) - 1.0 / 3.0) < 1e-12);
  CHECK(std::abs(free_amplitude(f, pi, th) - 1.0 / (pi * pi)) < 1e-10);
  CHECK(1.0 / (pi * pi) == doctest::Approx(0.101321).epsilon(1e-5));

  FieldSpec odd = FieldSpec::scalar([](const Point3& y) { return y.x() * bump_profile(y.norm()); });
  odd.support = SupportBall{Point3::Zero(), 1.0};
  CHECK(std::abs(free_amplitude(odd, 0.0, Point3::UnitX())) < 1e-15);

  SUBCASE("entire in k: derivatives along two paths agree") {
    const FreeAmplitude A(f);
    const Complex k0(1.1, 0.3);
    const double h = 1e-4;
    const Complex along_real = (A(k0 + h, th) - A(k0 - h, th)) / (2 * h);
    const Complex along_imag = (A(k0 + Complex(0, h), th) - A(k0 - Complex(0, h), th)) / Complex(0, 2 * h);
    CHECK(std::abs(along_real - along_imag) < 1e-7);
  }
  FieldSpec wide = bump_scalar(1.0, Point3::Zero(), 1.5);
  CHECK_THROWS_AS(FreeAmplitude{wide}, Error);
}

TEST_CASE("amplitude extraction") {
  const Complex k(1.0, 0.0);
  std::vector<Complex> zero(extraction_radii.size());
  CHECK(extract_amplitude(extraction_radii, zero, k).value == Complex{});

  std::vector<Complex> g0;
  for (double r : extraction_radii) g0.push_back(std::exp(Complex(0, 1) * k * r) / (4 * pi * r));
  CHECK(std::abs(extract_amplitude(extraction_radii, g0, k).value - 1.0 / (4 * pi)) < 1e-14);

  std::vector<Complex> noise;
  std::mt19937_64 g(3);
  std::normal_distribution<double> n;
  for (std::size_t i = 0; i < extraction_radii.size(); ++i) noise.push_back(Complex(n(g), n(g)));
  CHECK_THROWS_AS(extract_amplitude(extraction_radii, noise, k), Error);
  CHECK_THROWS_AS(extract_amplitude({1, 2, 3}, {0, 0, 0}, k), Error);
}

TEST_CASE("free closed loop through the resolvent") {
  const FieldSpec f = unit_ball_indicator();
  for (double k : {0.7, 1.0, 1.3}) {
    const FarFieldAmplitude A = far_field_from_resolvent({k, 0.0}, FieldSpec::zero_vector(), f, 4, 4,
                                                         extraction_radii);
    REQUIRE(A.values.size() == 16);
    for (const Complex& a : A.values) CHECK(std::abs(a - indicator_amplitude(k)) < 1e-4);
  }
}

TEST_CASE("spectral density") {
  const FieldSpec f = unit_ball_indicator();
  FarFieldAmplitude A = free_far_field(f, 1.0);
  const double d = spectral_density(A, 1.0).density;
  CHECK(spectral_density(A, 1.0).E == 1.0);
  // k/π · 4π|A|² with A = sin 1 − cos 1.
  CHECK(d == doctest::Approx(0.362814).epsilon(1e-5));
  CHECK(d == doctest::Approx(4 * std::pow(std::sin(1.0) - std::cos(1.0), 2)).epsilon(1e-10));
  for (Complex& a : A.values) a *= 2.0;
  CHECK(spectral_density(A, 1.0).density == doctest::Approx(4 * d));
  for (Complex& a : A.values) a = 0.0;
  CHECK(spectral_density(A, 1.0).density == 0.0);
}

TEST_CASE("harmonic measure on an equilateral triangle") {
  const TriangleDomain T{0.0, 1.0, 3.0};
  const HarmonicMeasureEstimate w = harmonic_measure(T, T.centroid(), 100000, 42);
  for (int e = 0; e < 3; ++e) CHECK(std::abs(w.edge_mass(e) - 1.0 / 3.0) < 0.01);
  CHECK(std::abs(w.total_mass() - 1.0) < 0.005);
  for (double m : w.masses) CHECK(m >= 0.0);

  const HarmonicMeasureEstimate again = harmonic_measure(T, T.centroid(), 100000, 42);
  CHECK(again.counts == w.counts);

  CHECK_THROWS_AS(harmonic_measure(T, Complex(0.5, 0.0), 10, 1), Error);
  CHECK_THROWS_AS(harmonic_measure(T, Complex(2.0, 0.5), 10, 1), Error);
  CHECK_THROWS_AS((TriangleDomain{0.0, 1.0, 2.0}.validate()), Error);
}

TEST_CASE("endpoint exponent of the harmonic measure") {
  for (double g1 : {3.0, 4.0}) {
    const TriangleDomain T{0.0, 1.0, g1};
    const HarmonicMeasureEstimate w = harmonic_measure(T, T.centroid(), 100000, 7);
    CHECK(std::abs(endpoint_exponent(w).slope - (g1 - 1.0)) < 0.3);
  }
}

TEST_CASE("mean-value property") {
  const TriangleDomain T{0.5, 1.5, 3.0};
  const Complex k0 = T.centroid() + Complex(0.05, 0.02);
  const HarmonicMeasureEstimate w = harmonic_measure(T, k0, 100000, 5);
  auto gap = [&](const std::function<double(Complex)>& nu) {
    std::vector<double> b;
    for (std::size_t i = 0; i < w.bins(); ++i) b.push_back(nu(w.bin_center(i)));
    return subharmonic_gap(b, nu(k0), w);
  };
  const MeanValueGap c = gap([](Complex) { return 2.5; });
  CHECK(std::abs(c.gap) < 1e-12);
  const MeanValueGap q = gap([](Complex s) { return (s * s).real(); });
  CHECK(std::abs(q.gap) < 3 * q.error);

  std::mt19937_64 g(9);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 5; ++trial) {
    const Complex c1(u(g), u(g)), c2(u(g), u(g)), c3(u(g), u(g));
    const MeanValueGap h = gap([&](Complex s) { return (c1 * s + c2 * s * s + c3 * s * s * s).real(); });
    CHECK(std::abs(h.gap) < 3 * h.error);
  }
  const MeanValueGap sub = gap([&](Complex s) { return std::norm(s - k0); });
  CHECK(sub.gap > 3 * sub.error);
  CHECK(subharmonic_test(std::vector<double>(w.bins(), 1.0), 1.0, w) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_THROWS_AS(subharmonic_test(std::vector<double>(w.bins() - 1, 0.0), 0.0, w), Error);
}

TEST_CASE("entropy lower bound") {
  const TriangleDomain T{0.5, 1.5, 3.0};
  const HarmonicMeasureEstimate w = harmonic_measure(T, T.centroid(), 20000, 3);
  const std::size_t n = static_cast<std::size_t>(w.bins_per_edge);
  CHECK(entropy_lower_bound(std::vector<double>(n, 1.0), w) == 0.0);
  CHECK(entropy_lower_bound(std::vector<double>(n, std::exp(1.0)), w) == doctest::Approx(w.edge_mass(0)));
  std::vector<double> d(n, 1.0);
  d[3] = 0.0;
  CHECK(entropy_lower_bound(d, w) == -std::numeric_limits<double>::infinity());
  d[3] = -1.0;
  CHECK_THROWS_AS(entropy_lower_bound(d, w), Error);
}

TEST_CASE("free entropy certificate") {
  const FieldSpec f = unit_ball_indicator();
  const TriangleDomain T{0.5, 1.5, 3.0};
  const Complex k0 = pick_k0(f, T);
  CHECK(T.contains(k0));
  CHECK(FreeAmplitude(f).norm(k0, sphere_rule(6, 12)) > 0.0);

  PickK0Options half;
  half.threshold = 0.5e-6;
  CHECK(pick_k0(f, T, half) == k0);

  const EntropyCertificate a = free_entropy_certificate(f, T, k0, 50000, 1);
  const EntropyCertificate b = free_entropy_certificate(f, T, k0, 50000, 2);
  CHECK(std::isfinite(a.entropy_integral));
  CHECK_FALSE(a.zero_density);
  // Each walker contributes ln σ′ of its base bin, or 0 off the base.
  double m1 = 0.0, m2 = 0.0;
  const HarmonicMeasureEstimate w = harmonic_measure(T, k0, 50000, 1);
  for (int i = 0; i < w.bins_per_edge; ++i) {
    const double l = std::log(a.densities[i]);
    m1 += w.masses[i] * l;
    m2 += w.masses[i] * l * l;
  }
  const double err = std::sqrt((m2 - m1 * m1) / 50000.0);
  CHECK(std::abs(a.entropy_integral - b.entropy_integral) < 4.0 * std::sqrt(2.0) * err + 1e-12);
  CHECK(a.mean_value_gap >= -3 * a.gap_stderr);

  FieldSpec zero = FieldSpec::scalar([](const Point3&) { return 0.0; });
  zero.support = SupportBall{Point3::Zero(), 1.0};
  zero.zero = true;
  CHECK_THROWS_AS(pick_k0(zero, T), Error);
}
