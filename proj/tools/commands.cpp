#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <map>

#include "cache.hpp"
#include "greenlab/anderson.hpp"
#include "greenlab/born.hpp"
#include "greenlab/eikonal.hpp"
#include "greenlab/harmonic.hpp"
#include "greenlab/helmholtz.hpp"
#include "greenlab/rng.hpp"
#include "greenlab/scattering.hpp"
#include "greenlab/verify.hpp"

namespace greenlab::cli {

namespace {

using json = nlohmann::json;
constexpr double nan = std::numeric_limits<double>::quiet_NaN();

class Stopwatch {
 public:
  Stopwatch(RunReport& r, std::string name) : r_(r), name_(std::move(name)), t0_(std::chrono::steady_clock::now()) {}
  ~Stopwatch() {
    r_.timings.emplace_back(name_, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count());
  }

 private:
  RunReport& r_;
  std::string name_;
  std::chrono::steady_clock::time_point t0_;
};

BornOptions born_options(const ExperimentConfig& c) {
  BornOptions o;
  o.eps = c.eps;
  o.source_quad = c.quad;
  return o;
}

json born_diagnostics(const BornDiagnostics& d) {
  return {{"m_Q", d.m_Q},           {"c_cal", d.c_cal},           {"smallness_ratio", d.smallness_ratio},
          {"grid_nodes", d.grid_nodes}, {"grid_radius", d.grid_radius}, {"grid_converged", d.grid_converged},
          {"observed_ratio", d.observed_ratio}};
}

void run_green(const ExperimentConfig& c, RunReport& r) {
  const FieldSpec Q = build_potential(c);
  const Point3 y(c.point[0], c.point[1], c.point[2]);
  const ComplexWavenumber k = c.k();
  std::optional<BornSolver> solver;
  {
    Stopwatch t(r, "born_iteration");
    solver.emplace(k, Q, y, born_options(c));
  }
  Table tab("kernel", {"x1", "x2", "x3", "re_G", "im_G", "re_G0", "im_G0", "rel_dev", "orders", "converged"});
  bool all = true;
  int max_orders = 0;
  double max_dev = 0.0;
  {
    Stopwatch t(r, "evaluate");
    for (int i = 0; i < c.points; ++i) {
      CounterRng rng(c.seed, static_cast<std::uint64_t>(i));
      Point3 x;
      do {
        for (int d = 0; d < 3; ++d) x[d] = c.box * (2.0 * rng.uniform() - 1.0);
      } while ((x - y).norm() < 0.1);
      const GreenEvaluation ev = solver->evaluate(x);
      const Complex g0 = free_green(x, y, k);
      const double dev = std::abs(ev.value - g0) / std::abs(g0);
      all = all && ev.converged;
      max_orders = std::max(max_orders, static_cast<int>(ev.orders.size()));
      max_dev = std::max(max_dev, dev);
      tab.add({x.x(), x.y(), x.z(), ev.value.real(), ev.value.imag(), g0.real(), g0.imag(), dev,
               static_cast<double>(ev.orders.size()), ev.converged ? 1.0 : 0.0});
    }
  }
  r.tables.push_back(std::move(tab));
  r.diagnostics = {{"converged", all}, {"max_orders", max_orders}, {"max_rel_dev_from_free", max_dev},
                   {"born", born_diagnostics(solver->diagnostics())}};
}

void run_resolvent(const ExperimentConfig& c, RunReport& r) {
  const FieldSpec Q = build_potential(c), f = build_source(c);
  const std::vector<Point3> rays = fibonacci_directions(c.dir_theta * c.dir_phi);
  ResolventTable res;
  {
    Stopwatch t(r, "solve_resolvent");
    res = solve_resolvent(c.k(), Q, f, rays, c.radii, born_options(c));
  }
  Table tab("field", {"ray", "d1", "d2", "d3", "r", "re_u", "im_u", "abs_u", "orders", "converged"});
  std::vector<double> envelope(c.radii.size(), 0.0);
  for (std::size_t i = 0; i < rays.size(); ++i)
    for (std::size_t j = 0; j < c.radii.size(); ++j) {
      const Complex u = res.values(i, j);
      envelope[j] = std::max(envelope[j], std::abs(u));
      tab.add({static_cast<double>(i), rays[i].x(), rays[i].y(), rays[i].z(), c.radii[j], u.real(), u.imag(),
               std::abs(u), static_cast<double>(res.order_count(i, j)), res.converged(i, j) ? 1.0 : 0.0});
    }
  r.tables.push_back(std::move(tab));
  const LinearFit env = fit_power_decay(c.radii, envelope);
  r.plots.push_back(loglog_plot("decay", "max over rays of |u|", "r", "|u|", c.radii, envelope, env.slope,
                                env.intercept));
  r.diagnostics = {{"source_norm", res.source_norm},
                   {"envelope_slope", env.slope},
                   {"converged", res.converged.all()},
                   {"born", born_diagnostics(res.diagnostics)}};
  try {
    const ClassClDecomposition cl = fit_class_cl(res);
    r.diagnostics["class_cl"] = {{"p_value", cl.p_value.exponent}, {"p_grad", cl.p_grad.exponent},
                                 {"group_a", cl.group_a},          {"group_b", cl.group_b},
                                 {"reliable", cl.p_value.reliable}};
  } catch (const Error& e) {
    r.diagnostics["class_cl"] = {{"skipped", e.what()}};
  }
}

std::vector<FarFieldAmplitude> amplitude_sweep(const ExperimentConfig& c, RunReport& r) {
  const FieldSpec Q = build_potential(c), f = build_source(c);
  std::vector<FarFieldAmplitude> out;
  Stopwatch t(r, "far_field");
  for (double k : c.k_values())
    out.push_back(far_field_from_resolvent({k, c.delta}, Q, f, c.dir_theta, c.dir_phi, c.radii, born_options(c)));
  return out;
}

void run_amplitude(const ExperimentConfig& c, RunReport& r) {
  const FreeAmplitude A0(build_source(c));
  const auto sweep = amplitude_sweep(c, r);
  Table tab("amplitude", {"k", "delta", "dir", "t1", "t2", "t3", "re_A", "im_A", "residual", "re_A0", "im_A0"});
  double max_residual = 0.0, max_dev = 0.0;
  for (const FarFieldAmplitude& A : sweep)
    for (std::size_t i = 0; i < A.values.size(); ++i) {
      const Point3& th = A.directions[i];
      const Complex a0 = A0(A.k.k(), th);
      max_residual = std::max(max_residual, A.residuals[i]);
      max_dev = std::max(max_dev, std::abs(A.values[i] - a0));
      tab.add({A.k.tau, A.k.delta, static_cast<double>(i), th.x(), th.y(), th.z(), A.values[i].real(),
               A.values[i].imag(), A.residuals[i], a0.real(), a0.imag()});
    }
  r.tables.push_back(std::move(tab));
  r.diagnostics = {{"max_extraction_residual", max_residual}, {"max_abs_dev_from_free", max_dev}};
}

void run_density(const ExperimentConfig& c, RunReport& r) {
  const FieldSpec f = build_source(c);
  const auto sweep = amplitude_sweep(c, r);
  Table tab("density", {"k", "delta", "E", "density", "free_density"});
  for (const FarFieldAmplitude& A : sweep) {
    const SpectralDensitySample s = spectral_density(A, A.k.tau);
    const double free = spectral_density(free_far_field(f, A.k.k(), c.dir_theta, c.dir_phi), A.k.tau).density;
    tab.add({A.k.tau, A.k.delta, s.E, s.density, free});
  }
  r.tables.push_back(std::move(tab));
  r.diagnostics = {{"k_count", sweep.size()}};
}

void run_entropy(const ExperimentConfig& c, RunReport& r) {
  const FieldSpec f = build_source(c);
  const TriangleDomain T{c.a1, c.a2, c.gamma1};
  HarmonicMeasureOptions ho;
  ho.bins_per_edge = c.bins;
  Complex k0;
  {
    Stopwatch t(r, "pick_k0");
    k0 = pick_k0(f, T);
  }
  EntropyCertificate cert;
  HarmonicMeasureEstimate omega;
  {
    Stopwatch t(r, "certificate");
    cert = free_entropy_certificate(f, T, k0, c.walkers, c.seed, ho);
    omega = harmonic_measure(T, k0, c.walkers, c.seed, ho);
  }
  Table bound("boundary", {"bin", "edge", "re_s", "im_s", "mass", "stderr", "nu"});
  for (std::size_t i = 0; i < omega.bins(); ++i) {
    const Complex s = omega.bin_center(i);
    bound.add({static_cast<double>(i), static_cast<double>(omega.edge_of(i)), s.real(), s.imag(), omega.masses[i],
               omega.stderrs[i], cert.nu[i]});
  }
  Table base("base", {"bin", "k", "density"});
  for (std::size_t i = 0; i < cert.densities.size(); ++i)
    base.add({static_cast<double>(i), omega.bin_center(i).real(), cert.densities[i]});
  r.tables.push_back(std::move(bound));
  r.tables.push_back(std::move(base));
  r.diagnostics = {{"k0", {k0.real(), k0.imag()}},
                   {"nu_k0", cert.nu_k0},
                   {"mean_value_gap", cert.mean_value_gap},
                   {"gap_stderr", cert.gap_stderr},
                   {"entropy_integral", cert.entropy_integral},
                   {"zero_density", cert.zero_density},
                   {"total_mass", omega.total_mass()}};
}

void run_eikonal(const ExperimentConfig& c, RunReport& r) {
  const FieldSpec V = build_potential(c);
  PhaseGridSpec spec;
  spec.n_r = c.grid_r;
  spec.n_theta = c.grid_theta;
  spec.n_phi = c.grid_phi;
  spec.r_min = c.grid_rmin;
  spec.r_max = c.grid_rmax;
  std::optional<PhaseCorrection> mu;
  {
    Stopwatch t(r, "picard");
    mu.emplace(picard_iterate_mu(V, c.tau, c.n_iter, spec));
  }
  Table tab("iterates", {"n", "diff_norm", "contraction_ratio", "residual", "sup_mu"});
  for (int n = 0; n <= mu->iteration(); ++n) {
    const double diff = n < static_cast<int>(mu->diff_norms.size()) ? mu->diff_norms[n] : nan;
    const double ratio = n >= 1 && n < static_cast<int>(mu->diff_norms.size()) ? mu->contraction_ratio(n) : nan;
    tab.add({static_cast<double>(n), diff, ratio, eikonal_residual(*mu, V, c.tau, n),
             mu->iterates[n].cwiseAbs().maxCoeff()});
  }
  r.tables.push_back(std::move(tab));
  r.diagnostics = {{"k", c.tau}, {"grid_points", mu->grid.size()}, {"h_log_r", mu->grid.h_log_r()}};
}

// Newtonian field of e^{−|x|²}: x̂[(√π/4) erf r − (r/2)e^{−r²}]/r².
double gaussian_newton(double r) {
  return (std::sqrt(pi) / 4.0 * std::erf(r) - 0.5 * r * std::exp(-r * r)) / (r * r);
}

void run_helmholtz(const ExperimentConfig& c, RunReport& r) {
  const FieldSpec V = build_potential(c);
  const Point3 dir = Point3(0.0, 0.6, 0.8);
  const double w = c.potential_radius, fd = 0.25 * c.h * w;
  // Points about x resolve the gaussian well only while it subtends a wide angle.
  const std::vector<double> rs = {0.25 * w, 0.5 * w, w, 1.5 * w, 2 * w, 2.5 * w, 3 * w, 3.5 * w, 4 * w, 5 * w};
  Table tab("field", {"r", "Q1", "Q2", "Q3", "abs_Q", "exact_abs_Q", "div_Q", "V", "div_err"});
  std::vector<double> mags, tail_r, tail_m;
  double worst = 0.0;
  Stopwatch t(r, "reconstruct");
  for (double rr : rs) {
    const Point3 x = rr * dir;
    const HelmholtzResult h = helmholtz_reconstruct(V, x);
    const double div = helmholtz_divergence(V, x, fd);
    const double v = V.value(x);
    // Relative to sup |V|; V itself underflows in the tail.
    const double rel = std::abs(div - v) / std::max(std::abs(c.eta), 1e-300);
    worst = std::max(worst, rel);
    mags.push_back(h.Q.norm());
    if (rr >= 2.5 * w) tail_r.push_back(rr), tail_m.push_back(h.Q.norm());
    tab.add({rr, h.Q.x(), h.Q.y(), h.Q.z(), h.Q.norm(), std::abs(c.eta) * w * gaussian_newton(rr / w), div, v, rel});
  }
  r.tables.push_back(std::move(tab));
  const LinearFit f = fit_power_decay(tail_r, tail_m);
  r.plots.push_back(loglog_plot("decay", "|Q| along a ray", "r", "|Q|", rs, mags, f.slope, f.intercept));
  r.diagnostics = {{"max_div_err", worst}, {"tail_slope", f.slope}, {"fd_step", fd}};
}

void run_anderson(const ExperimentConfig& c, RunReport& r) {
  AndersonPotentialSpec spec = lattice_anderson_spec(c.anderson_ball, c.eps, c.anderson_spacing);
  spec.sign_law = c.sign_law == "uniform" ? SignLaw::Uniform : SignLaw::Rademacher;
  spec.seed = c.seed;
  AndersonStatsReport st;
  {
    Stopwatch t(r, "decay_stats");
    st = anderson_decay_stats(spec, c.realizations, c.seed);
  }
  Table decay("decay", {"r", "mean_sq", "stderr", "exact_sq", "gradient_ratio"});
  for (std::size_t i = 0; i < st.radii.size(); ++i)
    decay.add({st.radii[i], st.mean_sq.empty() ? nan : st.mean_sq[i], st.mean_sq_stderr.empty() ? nan : st.mean_sq_stderr[i],
               st.exact_sq.empty() ? nan : st.exact_sq[i], i < st.gradient_ratio.size() ? st.gradient_ratio[i] : nan});
  Table zs("mean_z", {"r", "component", "z"});
  for (std::size_t i = 0; i < st.mean_z_scores.size(); ++i)
    zs.add({st.radii[i / 3], static_cast<double>(i % 3), st.mean_z_scores[i]});
  r.tables.push_back(std::move(decay));
  r.tables.push_back(std::move(zs));
  r.diagnostics = {{"centers", spec.size()},
                   {"undefined", st.undefined},
                   {"decay_exponent", st.decay_exponent},
                   {"decay_r2", st.decay.r2},
                   {"target", 1.0 + 2.0 * c.eps},
                   {"sup_exponent", st.sup_exponent},
                   {"sup_exponent_stderr", st.sup_exponent_stderr},
                   {"max_abs_z", st.max_abs_z},
                   {"odd_moments_vanish", st.odd_moments_vanish}};
  if (!st.undefined) {
    std::vector<double> shifted;
    for (double x : st.radii) shifted.push_back(1.0 + x);
    r.plots.push_back(loglog_plot("decay", "E|Q2|^2", "1+r", "E|Q2|^2", shifted, st.mean_sq, st.decay.slope,
                                  st.decay.intercept));
    Table mom("moments", {"p", "k1", "k2", "k3", "abs_k", "empirical", "stderr", "exact"});
    const std::vector<Point3> pts = lattice_sample_points(st.radii);
    Stopwatch t(r, "moments");
    for (int p : {1, 2}) {
      const MomentReport m = moment_bound_check(spec, p, pts, c.realizations, c.seed);
      for (std::size_t i = 0; i < pts.size(); ++i)
        mom.add({static_cast<double>(p), pts[i].x(), pts[i].y(), pts[i].z(), m.radii[i], m.empirical[i],
                 m.standard_error[i], m.exact[i]});
      r.diagnostics["moment_p" + std::to_string(p)] = {{"exponent", m.exponent}, {"target", m.target}};
    }
    r.tables.push_back(std::move(mom));
  }
  Table real("realization", {"x1", "x2", "x3", "amplitude", "sign"});
  const std::uint64_t s0 = realization_seed(c.seed, 0);
  for (std::size_t j = 0; j < spec.size(); ++j)
    real.add({spec.centers[j].x(), spec.centers[j].y(), spec.centers[j].z(), spec.amplitudes[j],
              anderson_sign(spec.sign_law, s0, j)});
  r.tables.push_back(std::move(real));
}

void run_verify_lemmas(const ExperimentConfig&, RunReport& r) {
  BoundSweepReport l1, l2;
  {
    Stopwatch t(r, "sphere_sweep");
    l1 = lemma1_default_sweep();
  }
  {
    Stopwatch t(r, "exterior_sweep");
    l2 = lemma2_sweep({0.1, 0.2, 0.35, 0.5, 0.75, 1.0}, {4.0, 8.0, 16.0});
  }
  Table tab("bounds", {"bound", "delta", "rho", "x", "lhs", "shape", "ratio"});
  json series = json::array();
  int idx = 0;
  for (const BoundSweepReport* rep : {&l1, &l2})
    for (const BoundSeries& s : rep->bounds) {
      for (const BoundSample& b : s.samples) tab.add({static_cast<double>(idx), b.delta, b.rho, b.x, b.lhs, b.shape, b.ratio});
      series.push_back({{"bound", idx++}, {"name", s.name}, {"C", s.C}, {"spread_x", s.spread_x},
                        {"spread_rho", s.spread_rho}, {"pass", s.pass}});
    }
  r.tables.push_back(std::move(tab));
  r.diagnostics = {{"series", series},      {"sphere_pass", l1.pass}, {"exterior_gamma", l2.gamma_fit},
                   {"exterior_r2", l2.r2},  {"exterior_pass", l2.pass}};
}

void run_dirac(const ExperimentConfig& c, RunReport& r) {
  const FieldSpec v = build_potential(c);
  const TestFunction psi = gaussian_test_function(1.0);
  Table tab("steps", {"h", "deviation", "offdiag", "unitary_error", "grid_points"});
  std::vector<DiracReport> reps;
  {
    Stopwatch t(r, "factorization");
    for (double h : {c.h, 0.5 * c.h}) reps.push_back(dirac_factorization_check(v, h, psi));
  }
  for (const DiracReport& d : reps)
    tab.add({d.h, d.deviation, d.offdiag, d.unitary_error, static_cast<double>(d.grid_points)});
  r.tables.push_back(std::move(tab));
  auto ratio = [](double a, double b) { return b > 0 ? a / b : nan; };
  r.diagnostics = {{"deviation_ratio", ratio(reps[0].deviation, reps[1].deviation)},
                   {"offdiag_ratio", ratio(reps[0].offdiag, reps[1].offdiag)},
                   {"unitary_error", std::max(reps[0].unitary_error, reps[1].unitary_error)}};
}

const std::map<std::string, void (*)(const ExperimentConfig&, RunReport&)>& dispatch() {
  static const std::map<std::string, void (*)(const ExperimentConfig&, RunReport&)> m = {
      {"green", run_green},         {"resolvent", run_resolvent}, {"amplitude", run_amplitude},
      {"density", run_density},     {"entropy", run_entropy},     {"eikonal", run_eikonal},
      {"helmholtz", run_helmholtz}, {"anderson", run_anderson},   {"verify-lemmas", run_verify_lemmas},
      {"dirac-check", run_dirac}};
  return m;
}

bool numerical_outcome(ErrorKind k) {
  return k == ErrorKind::Divergence || k == ErrorKind::Contraction || k == ErrorKind::Accuracy ||
         k == ErrorKind::Extraction;
}

}  // namespace

RunReport run_command(const ExperimentConfig& c) {
  c.validate();
  RunReport r;
  r.command = c.command;
  r.digest = config_digest(c);
  r.provenance = {{"seed", c.seed}, {"config", canonical_text(c)}};
  dispatch().at(c.command)(c, r);
  return r;
}

int execute(const ExperimentConfig& c, std::ostream& out, std::ostream& err) {
  try {
    c.validate();
  } catch (const ConfigError& e) {
    err << e.what() << "\n";
    return kConfigError;
  }
  const std::string digest = config_digest(c);
  std::optional<ResultCache> cache;
  if (c.cache) cache.emplace(cache_directory(c), err);

  RunReport report;
  bool hit = false;
  if (cache) {
    if (auto stored = cache->lookup(digest)) {
      report = std::move(*stored);
      report.cache_hit = hit = true;
    }
  }
  if (!hit) {
    try {
      report = run_command(c);
    } catch (const ConfigError& e) {
      err << e.what() << "\n";
      return kConfigError;
    } catch (const Error& e) {
      if (!numerical_outcome(e.kind())) {
        err << "error (" << to_string(e.kind()) << ") in " << c.command << ": " << e.what() << "\n";
        return kConfigError;
      }
      report = RunReport{};
      report.command = c.command;
      report.digest = digest;
      report.status = "diverged";
      report.error = std::string(to_string(e.kind())) + ": " + e.what();
      report.provenance = {{"seed", c.seed}, {"config", canonical_text(c)}};
      err << "numerical failure in " << c.command << ": " << report.error << "\n";
      try {
        write_outputs(report, c.output);
      } catch (const IoError& io) {
        err << "io error: " << io.what() << "\n";
        return kIoError;
      }
      return kDivergence;
    }
    if (cache) cache->store(report);
  }
  try {
    write_outputs(report, c.output);
  } catch (const IoError& io) {
    err << "io error: " << io.what() << "\n";
    return kIoError;
  }
  out << c.command << " digest " << report.digest << (hit ? " (cache hit)" : "") << "\n";
  for (const Table& t : report.tables) out << "  " << t.name() << ": " << t.rows() << " rows\n";
  return kSuccess;
}

std::string command_help(const std::string& command) {
  static const std::map<std::string, std::string> help = {
      {"green", "Born series for G(x, y) with pole [source] point at k = tau + i delta.\n"
                "kernel.csv: x1,x2,x3,re_G,im_G,re_G0,im_G0,rel_dev,orders,converged"},
      {"resolvent", "u = (H - k^2)^-1 f on fibonacci rays x [sampling] radii.\n"
                    "field.csv: ray,d1,d2,d3,r,re_u,im_u,abs_u,orders,converged"},
      {"amplitude", "Far-field amplitude extracted from the resolvent for each k of the sweep.\n"
                    "amplitude.csv: k,delta,dir,t1,t2,t3,re_A,im_A,residual,re_A0,im_A0 (A0: Q = 0)"},
      {"density", "Spectral density k/pi ||A||^2 for each k of the sweep.\n"
                  "density.csv: k,delta,E,density,free_density"},
      {"entropy", "Harmonic measure of the triangle and the free entropy certificate.\n"
                  "boundary.csv: bin,edge,re_s,im_s,mass,stderr,nu; base.csv: bin,k,density"},
      {"eikonal", "Picard iteration for the phase correction mu at k = tau.\n"
                  "iterates.csv: n,diff_norm,contraction_ratio,residual,sup_mu"},
      {"helmholtz", "Newtonian reconstruction Q of the gaussian V along a ray.\n"
                    "field.csv: r,Q1,Q2,Q3,abs_Q,exact_abs_Q,div_Q,V,div_err (|div Q - V| / sup|V|)"},
      {"anderson", "Monte Carlo decay statistics of the far part Q2 of the Anderson field.\n"
                   "decay.csv: r,mean_sq,stderr,exact_sq,gradient_ratio; mean_z.csv: r,component,z;\n"
                   "moments.csv: p,k1,k2,k3,abs_k,empirical,stderr,exact; realization.csv: x1,x2,x3,amplitude,sign"},
      {"verify-lemmas", "Parameter sweeps of the sphere and exterior exponential bounds.\n"
                        "bounds.csv: bound,delta,rho,x,lhs,shape,ratio (bound indexes diagnostics.series)"},
      {"dirac-check", "Finite-difference check that D^2 reproduces the Schrodinger block, at h and h/2.\n"
                      "steps.csv: h,deviation,offdiag,unitary_error,grid_points"},
  };
  const auto it = help.find(command);
  return it == help.end() ? std::string{} : it->second;
}

}  // namespace greenlab::cli
