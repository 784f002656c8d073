#include "greenlab/growth.hpp"

#include "greenlab/cutoff.hpp"
#include "greenlab/potentials.hpp"

namespace greenlab {

double calibrated_c_cal() {
  // Output of calibrate_smallness() with the default family and options.
  return 0.015416281699207536;
}

CalibrationResult calibrate_smallness(const CalibrationFamily& family, const BornOptions& opt) {
  CalibrationResult out;
  for (double rho : family.radii)
    for (double eta : family.etas)
      for (double delta : family.deltas) {
        const FieldSpec Q = bump_vector_field(eta, Point3::UnitX(), Point3::Zero(), rho);
        BornOptions o = opt;
        o.c_cal = 1.0;
        const BornSolver s({family.tau, delta}, Q, Point3::Zero().eval(), o);
        const BornDiagnostics& d = s.diagnostics();
        const double sample = d.observed_ratio * delta * delta * delta / d.m_Q;
        out.samples.push_back(sample);
        out.c_cal = std::max(out.c_cal, sample);
      }
  return out;
}

namespace {

// log of |x|² e^{2δ|x|} ‖G⁰(x,·)‖²_{L²(B_ρ)} for |x| > ρ, via the shell
// reduction ‖G⁰‖² = (1/(16π|x|)) ∫ e^{−2δs}(ρ² − (|x|−s)²)/s ds.
double log_kernel_proxy(double x, double rho, double delta) {
  const double vmax = std::min(2.0 * rho, 60.0 / delta);
  const int panels = std::max(1, static_cast<int>(std::ceil(vmax * delta)));
  std::vector<double> br;
  for (int p = 0; p <= panels; ++p) br.push_back(vmax * p / panels);
  const Rule1D r = composite_gauss(br, 16);
  double I = 0.0;
  for (std::size_t i = 0; i < r.x.size(); ++i) {
    const double v = r.x[i];
    I += r.w[i] * std::exp(-2.0 * delta * v) * v * (2.0 * rho - v) / (x - rho + v);
  }
  return std::log(x) + 2.0 * delta * rho - std::log(16.0 * pi) + std::log(I);
}

}  // namespace

GrowthEstimate cutoff_resolvent_growth(const FieldSpec& Q, const FieldSpec& f, double delta, double eps,
                                       double c_cal, const GrowthOptions& opt) {
  require(delta > 0, ErrorKind::Parameter, "cutoff_resolvent_growth: delta must be positive");
  require(eps > 0, ErrorKind::Parameter, "cutoff_resolvent_growth: eps must be positive");
  require(c_cal > 0, ErrorKind::Parameter, "cutoff_resolvent_growth: C_cal must be positive");
  require(f.support.has_value(), ErrorKind::Precondition, "cutoff_resolvent_growth: f must be compactly supported");
  GrowthEstimate g;
  g.delta = delta;
  const double d3 = delta * delta * delta;
  g.R_used = std::pow(d3 / (2.0 * c_cal), -2.0 / eps);
  const CutoffSplit split = make_cutoff_split(Q, g.R_used);
  const double R = g.R_used;
  const auto dirs = cube_directions();

  if (!split.Q2.zero) {
    std::vector<double> radii = {R + 0.25, R + 0.5, R + 0.75};
    for (double s = 1.0; s <= 256.0; s *= 2.0) radii.push_back((R + 1.0) * s);
    const double m2 = estimate_decay_envelope(split.Q2, eps / 2.0, radii, dirs);
    const double mv2 = estimate_decay_envelope(split.Q2.divergence_field(), eps / 2.0, radii, dirs);
    g.m_Q2 = std::max(m2, mv2);
  }
  g.q2 = c_cal * g.m_Q2 / d3;
  if (g.q2 >= 1.0)
    throw DivergenceError("cutoff_resolvent_growth: smallness violated after the split (q2 = " +
                          std::to_string(g.q2) + ")");

  if (!Q.zero) {
    const FieldSpec V1 = split.Q1.divergence_field();
    std::vector<double> radii = {0.0, R + 0.25, R + 0.5, R + 0.75};
    for (double s = R; s > 1e-3 && radii.size() < 64; s *= 0.5) radii.push_back(s);
    for (double r : default_envelope_radii())
      if (r <= R + 1.0) radii.push_back(r);
    for (double r : radii)
      for (const Point3& d : dirs) g.v1_sup = std::max(g.v1_sup, std::abs(V1.value(r * d)));
  }
  {
    NodeSet ball;
    ball_nodes(f.support->center, f.support->radius, 24, 16, 32, false, ball);
    g.source_norm = std::sqrt(ball.sum([&](const Point3& p) { return f.value(p) * f.value(p); }));
  }

  const double rho = R + 1.0;
  g.octave_lo = 4.0 * rho;
  g.octave_hi = 8.0 * rho;
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < opt.octave_samples; ++i) {
    const double x = g.octave_lo * std::pow(2.0, static_cast<double>(i) / (opt.octave_samples - 1));
    best = std::max(best, log_kernel_proxy(x, rho, delta));
  }
  g.kernel_log_proxy = 0.5 * best;
  const double resolvent = g.source_norm * (1.0 + g.v1_sup / (2.0 * std::abs(opt.tau) * delta));
  g.log_A_free = g.kernel_log_proxy + std::log(resolvent);
  g.log_A_delta = g.log_A_free + std::log1p(g.q2 / (1.0 - g.q2));
  g.A_free = std::exp(g.log_A_free);
  g.A_delta = std::exp(g.log_A_delta);
  return g;
}

GrowthSweep growth_sweep(const FieldSpec& Q, const FieldSpec& f, const std::vector<double>& deltas,
                         double eps, double c_cal, const GrowthOptions& opt) {
  GrowthSweep s;
  std::vector<double> lx, ly;
  for (double d : deltas) {
    s.points.push_back(cutoff_resolvent_growth(Q, f, d, eps, c_cal, opt));
    if (s.points.back().log_A_delta > 0) {
      lx.push_back(std::log(d));
      ly.push_back(std::log(s.points.back().log_A_delta));
    }
  }
  if (lx.size() >= 2) {
    s.fit = fit_line(lx, ly);
    s.gamma_fit = -s.fit.slope;
    for (auto& p : s.points) p.gamma_fit = s.gamma_fit;
  }
  return s;
}

}  // namespace greenlab
