#include "greenlab/born.hpp"

#include <algorithm>

#include "greenlab/fit.hpp"

namespace greenlab {

double born_envelope_constant(const FieldSpec& Q, double eps) {
  if (Q.zero) return 0.0;
  const auto radii = default_envelope_radii();
  const double mq = estimate_decay_envelope(Q, eps, radii);
  const double mv = estimate_decay_envelope(Q.divergence_field(), eps, radii);
  return std::max(mq, mv);
}

namespace {

// Lagrange basis values at t for the given abscissae.
template <std::size_t N>
void lagrange(const double* xs, double t, double* out) {
  for (std::size_t i = 0; i < N; ++i) {
    double l = 1.0;
    for (std::size_t j = 0; j < N; ++j)
      if (j != i) l *= (t - xs[j]) / (xs[i] - xs[j]);
    out[i] = l;
  }
}

void lagrange_dyn(const double* xs, int n, double t, double* out) {
  for (int i = 0; i < n; ++i) {
    double l = 1.0;
    for (int j = 0; j < n; ++j)
      if (j != i) l *= (t - xs[j]) / (xs[i] - xs[j]);
    out[i] = l;
  }
}

// Window [lo, hi] of the ray x + rω inside the ball (c, R), r >= 0.
bool ray_in_ball(const Point3& x, const Point3& w, const Point3& c, double R, double& lo, double& hi) {
  const Point3 d = c - x;
  const double b = d.dot(w);
  const double disc = b * b - (d.squaredNorm() - R * R);
  if (disc <= 0.0) return false;
  const double s = std::sqrt(disc);
  lo = std::max(0.0, b - s);
  hi = b + s;
  return hi > lo;
}

}  // namespace

struct BornSolver::Impl {
  ComplexWavenumber k;
  FieldSpec Q;
  BornOptions opt;
  bool point_source = true;
  Point3 y = Point3::Zero();
  FieldSpec f;

  // iteration grid
  Point3 c = Point3::Zero();
  double R = 0.0;
  std::vector<double> rbreaks;
  Rule1D rrule;
  int nr_panel = 0;
  const SphereRule* sph = nullptr;
  std::vector<Point3> nodes;
  std::vector<double> weights;
  std::vector<double> Vn;
  // iterates: u[n] on the grid; for point sources u[0] is unused
  std::vector<std::vector<Complex>> u;
  int first = 1;

  // volume-source rule on the support of f
  NodeSet f_ball;
  std::vector<double> f_vals;

  BornDiagnostics diag;

  double V(const Point3& w) const { return Q.divergence(w); }

  void build_grid();
  Complex interpolate(const std::vector<Complex>& vals, const Point3& w) const;
  Complex apply_minus_B(const std::vector<Complex>& vals, const Point3& x) const;
  Complex order1_point(const Point3& x) const;
  Complex source_field(const Point3& x) const;
  void iterate();
};

void BornSolver::Impl::build_grid() {
  const BornGridSpec& g = opt.grid;
  if (Q.compact()) {
    const SupportBall& s = *Q.support;
    if (point_source && s.contains(y)) {
      c = y;
      R = (y - s.center).norm() + s.radius;
    } else {
      c = s.center;
      R = s.radius;
    }
  } else {
    require(k.delta > 0, ErrorKind::Precondition, "Born grid: non-compact Q needs Im k > 0");
    c = Point3::Zero();
    R = std::min(g.max_radius, std::log(1.0 / opt.truncation_tol) / k.delta);
  }
  std::vector<double> cuts = {0.0};
  if (!point_source && f.support && (f.support->center - c).norm() < 1e-12 && f.support->radius < R)
    cuts.push_back(f.support->radius);
  cuts.push_back(R);
  rbreaks = {0.0};
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const double len = cuts[s + 1] - cuts[s];
    const int panels = std::max(1, static_cast<int>(std::ceil(len / g.panel_width - 1e-9)));
    for (int p = 1; p <= panels; ++p) rbreaks.push_back(cuts[s] + len * p / panels);
  }
  nr_panel = g.n_radial;
  rrule = composite_gauss(rbreaks, nr_panel);
  sph = &sphere_rule(g.n_theta, g.n_phi);
  nodes.clear();
  weights.clear();
  for (std::size_t i = 0; i < rrule.x.size(); ++i)
    for (std::size_t j = 0; j < sph->dirs.size(); ++j) {
      const double r = rrule.x[i];
      nodes.push_back(c + r * sph->dirs[j]);
      weights.push_back(rrule.w[i] * r * r * sph->w[j]);
    }
  Vn.resize(nodes.size());
  for (std::size_t j = 0; j < nodes.size(); ++j) Vn[j] = V(nodes[j]);
  diag.grid_nodes = static_cast<long>(nodes.size());
  diag.grid_radius = R;
  diag.grid_center = c;
}

Complex BornSolver::Impl::interpolate(const std::vector<Complex>& vals, const Point3& w) const {
  const Point3 d = w - c;
  const double r = d.norm();
  if (r >= R) return {};
  const int nt = sph->n_theta, np = sph->n_phi;

  // radial: Lagrange on the panel's GL nodes
  const int panel = std::clamp(
      static_cast<int>(std::upper_bound(rbreaks.begin(), rbreaks.end(), r) - rbreaks.begin()) - 1, 0,
      static_cast<int>(rbreaks.size()) - 2);
  const int r0 = panel * nr_panel;
  double lr[32];
  lagrange_dyn(&rrule.x[r0], nr_panel, r, lr);

  // polar: 4-point stencil on the GL θ nodes
  const double theta = r > 0 ? std::acos(std::clamp(d.z() / r, -1.0, 1.0)) : 0.0;
  int it = static_cast<int>(std::upper_bound(sph->theta.begin(), sph->theta.end(), theta) - sph->theta.begin()) - 2;
  it = std::clamp(it, 0, nt - 4);
  double lt[4];
  lagrange<4>(&sph->theta[it], theta, lt);

  // azimuth: periodic 4-point stencil on the uniform φ nodes
  double phi = std::atan2(d.y(), d.x());
  if (phi < 0) phi += 2.0 * pi;
  const double hphi = 2.0 * pi / np;
  const double s = phi / hphi - 0.5;
  const int j0 = static_cast<int>(std::floor(s)) - 1;
  const double xs[4] = {0.0, 1.0, 2.0, 3.0};
  double lp[4];
  lagrange<4>(xs, s - j0, lp);
  int jp[4];
  for (int q = 0; q < 4; ++q) jp[q] = ((j0 + q) % np + np) % np;

  Complex acc{};
  for (int a = 0; a < nr_panel; ++a) {
    const std::size_t base_r = static_cast<std::size_t>(r0 + a) * nt;
    Complex ra{};
    for (int b = 0; b < 4; ++b) {
      const std::size_t base = (base_r + it + b) * np;
      Complex tb{};
      for (int q = 0; q < 4; ++q) tb += lp[q] * vals[base + jp[q]];
      ra += lt[b] * tb;
    }
    acc += lr[a] * ra;
  }
  return acc;
}

Complex BornSolver::Impl::apply_minus_B(const std::vector<Complex>& vals, const Point3& x) const {
  const BornGridSpec& g = opt.grid;
  const Complex ik(-k.delta, k.tau);
  if ((x - c).norm() >= R + g.far_margin) {
    Complex acc{};
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      const double r = (x - nodes[j]).norm();
      acc += weights[j] * Vn[j] * vals[j] * std::exp(ik * r) / r;
    }
    return -acc / (4.0 * pi);
  }
  const SphereRule& loc = sphere_rule(g.local_n_theta, g.local_n_phi);
  Complex acc{};
  std::vector<double> br;
  for (std::size_t j = 0; j < loc.dirs.size(); ++j) {
    const Point3& w = loc.dirs[j];
    double lo, hi;
    if (!ray_in_ball(x, w, c, R, lo, hi)) continue;
    const int panels = std::max(1, static_cast<int>(std::ceil((hi - lo) / (2.0 * g.panel_width))));
    br.clear();
    for (int p = 0; p <= panels; ++p) br.push_back(lo + (hi - lo) * p / panels);
    const Rule1D rr = composite_gauss(br, g.local_n_radial);
    Complex ray{};
    for (std::size_t i = 0; i < rr.x.size(); ++i) {
      const Point3 p = x + rr.x[i] * w;
      const double v = V(p);
      if (v == 0.0) continue;
      ray += rr.w[i] * rr.x[i] * std::exp(ik * rr.x[i]) * v * interpolate(vals, p);
    }
    acc += loc.w[j] * ray;
  }
  return -acc / (4.0 * pi);
}

Complex BornSolver::Impl::order1_point(const Point3& x) const {
  NodeSet ns;
  double s_max = std::numeric_limits<double>::infinity();
  if (!Q.compact()) s_max = (x - y).norm() + std::log(1.0 / opt.truncation_tol) / k.delta;
  two_center_nodes(x, y, s_max, Q.support, opt.grid.order1, ns);
  const Complex ik(-k.delta, k.tau);
  Complex acc{};
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const Point3& w = ns.p[i];
    acc += ns.w[i] * std::exp(ik * ((x - w).norm() + (w - y).norm())) * V(w);
  }
  return -acc / (16.0 * pi * pi);
}

Complex BornSolver::Impl::source_field(const Point3& x) const {
  if (point_source) return free_green(x, y, k);
  const SupportBall& s = *f.support;
  const Complex ik(-k.delta, k.tau);
  if ((x - s.center).norm() >= 1.5 * s.radius) {
    Complex acc{};
    for (std::size_t j = 0; j < f_ball.size(); ++j) {
      if (f_vals[j] == 0.0) continue;
      const double r = (x - f_ball.p[j]).norm();
      acc += f_ball.w[j] * f_vals[j] * std::exp(ik * r) / r;
    }
    return acc / (4.0 * pi);
  }
  const QuadratureSpec& q = opt.source_quad;
  const SphereRule& loc = sphere_rule(q.n_theta, q.n_phi);
  Complex acc{};
  for (std::size_t j = 0; j < loc.dirs.size(); ++j) {
    const Point3& w = loc.dirs[j];
    double lo, hi;
    if (!ray_in_ball(x, w, s.center, s.radius, lo, hi)) continue;
    const Rule1D rr = gauss_legendre_on(lo, hi, q.n_radial);
    Complex ray{};
    for (std::size_t i = 0; i < rr.x.size(); ++i)
      ray += rr.w[i] * rr.x[i] * std::exp(ik * rr.x[i]) * f.value(x + rr.x[i] * w);
    acc += loc.w[j] * ray;
  }
  return acc / (4.0 * pi);
}

void BornSolver::Impl::iterate() {
  const double eps = opt.eps;
  diag.c_cal = opt.c_cal < 0 ? calibrated_c_cal() : opt.c_cal;
  diag.m_Q = born_envelope_constant(Q, eps);
  diag.smallness_ratio = k.delta > 0 ? diag.m_Q * diag.c_cal / std::pow(k.delta, 3)
                                     : (diag.m_Q > 0 ? std::numeric_limits<double>::infinity() : 0.0);
  if (!point_source) {
    require(f.support.has_value(), ErrorKind::Precondition, "volume source must be compactly supported");
    ball_nodes(f.support->center, f.support->radius, opt.source_quad.n_radial * 3 / 2,
               opt.source_quad.n_theta, opt.source_quad.n_phi, false, f_ball);
    f_vals.resize(f_ball.size());
    for (std::size_t j = 0; j < f_ball.size(); ++j) f_vals[j] = f.value(f_ball.p[j]);
  }
  if (Q.zero) {
    diag.grid_converged = true;
    return;
  }
  build_grid();
  first = point_source ? 1 : 0;
  u.assign(first, {});
  std::vector<Complex> cur(nodes.size());
  for (std::size_t j = 0; j < nodes.size(); ++j)
    cur[j] = point_source ? order1_point(nodes[j]) : source_field(nodes[j]);
  auto sup = [](const std::vector<Complex>& v) {
    double m = 0.0;
    for (const Complex& z : v) m = std::max(m, std::abs(z));
    return m;
  };
  u.push_back(cur);
  diag.grid_norms.push_back(sup(cur));
  int growth = 0;
  for (int n = first + 1; n <= opt.n_max; ++n) {
    if (diag.grid_norms.back() <= 0.1 * opt.tol) {
      diag.grid_converged = true;
      break;
    }
    const std::vector<Complex>& prev = u.back();
    std::vector<Complex> next(nodes.size());
    for (std::size_t j = 0; j < nodes.size(); ++j) next[j] = apply_minus_B(prev, nodes[j]);
    const double nrm = sup(next);
    growth = nrm > diag.grid_norms.back() ? growth + 1 : 0;
    diag.grid_norms.push_back(nrm);
    u.push_back(std::move(next));
    if (growth >= 3)
      throw DivergenceError("Born series: term growth over 3 consecutive orders (smallness violated, ratio " +
                            std::to_string(diag.smallness_ratio) + ")");
  }
  const auto& gn = diag.grid_norms;
  if (gn.size() >= 2 && gn[gn.size() - 2] > 0) {
    // geometric mean of up to the last three ratios, skipping the first
    const std::size_t n = gn.size();
    const std::size_t m = std::min<std::size_t>(3, n - 1);
    double lr = 0.0;
    int cnt = 0;
    for (std::size_t i = n - m; i < n; ++i)
      if (gn[i] > 0 && gn[i - 1] > 0) {
        lr += std::log(gn[i] / gn[i - 1]);
        ++cnt;
      }
    diag.observed_ratio = cnt ? std::exp(lr / cnt) : 0.0;
  }
}

BornSolver::BornSolver(const ComplexWavenumber& k, const FieldSpec& Q, const Point3& y, const BornOptions& opt)
    : impl_(std::make_unique<Impl>()) {
  require(Q.is_vector(), ErrorKind::Parameter, "BornSolver: Q must be a vector field");
  require(k.delta > 0, ErrorKind::Precondition, "BornSolver: point sources need Im k > 0");
  impl_->k = k;
  impl_->Q = Q;
  impl_->opt = opt;
  impl_->point_source = true;
  impl_->y = y;
  impl_->iterate();
}

BornSolver::BornSolver(const ComplexWavenumber& k, const FieldSpec& Q, const FieldSpec& f, const BornOptions& opt)
    : impl_(std::make_unique<Impl>()) {
  require(Q.is_vector(), ErrorKind::Parameter, "BornSolver: Q must be a vector field");
  require(!f.is_vector(), ErrorKind::Parameter, "BornSolver: source must be scalar");
  require(k.delta > 0 || Q.compact(), ErrorKind::Precondition,
          "BornSolver: real k needs a compactly supported Q");
  require(k.delta >= 0, ErrorKind::Precondition, "BornSolver: Im k must be nonnegative");
  impl_->k = k;
  impl_->Q = Q;
  impl_->opt = opt;
  impl_->point_source = false;
  impl_->f = f;
  impl_->iterate();
}

BornSolver::~BornSolver() = default;
BornSolver::BornSolver(BornSolver&&) noexcept = default;

const BornDiagnostics& BornSolver::diagnostics() const { return impl_->diag; }

int BornSolver::available_orders() const {
  if (impl_->Q.zero) return 1;
  return static_cast<int>(impl_->u.size()) + 1;
}

Complex BornSolver::source_field(const Point3& x) const { return impl_->source_field(x); }

std::vector<Complex> BornSolver::terms(const Point3& x, int max_order) const {
  const Impl& m = *impl_;
  const int last = max_order < 0 ? available_orders() - 1 : std::min(max_order, available_orders() - 1);
  std::vector<Complex> t;
  t.push_back(m.source_field(x));
  for (int n = 1; n <= last; ++n) {
    if (m.point_source && n == 1) t.push_back(m.order1_point(x));
    else t.push_back(m.apply_minus_B(m.u[n - 1], x));
  }
  return t;
}

GreenEvaluation BornSolver::evaluate(const Point3& x) const {
  const Impl& m = *impl_;
  GreenEvaluation ev;
  ev.x = x;
  ev.y = m.y;
  ev.k = m.k;
  ev.smallness_ratio = m.diag.smallness_ratio;
  const int avail = available_orders();
  for (int n = 0; n < avail; ++n) {
    Complex t;
    if (n == 0) t = m.source_field(x);
    else if (m.point_source && n == 1) t = m.order1_point(x);
    else t = m.apply_minus_B(m.u[n - 1], x);
    ev.value += t;
    ev.orders.push_back(std::abs(t));
    if (n > 0 && std::abs(t) < m.opt.tol) {
      ev.converged = true;
      break;
    }
    if (m.Q.zero) ev.converged = true;
  }
  return ev;
}

GreenEvaluation born_series_green(const ComplexWavenumber& k, const FieldSpec& Q, const Point3& x,
                                  const Point3& y, double tol, int n_max, const BornOptions& opt) {
  require((x - y).norm() > 0, ErrorKind::Singularity, "born_series_green: x == y");
  BornOptions o = opt;
  o.tol = tol;
  o.n_max = n_max;
  if (Q.zero) {
    GreenEvaluation ev;
    ev.x = x;
    ev.y = y;
    ev.k = k;
    ev.value = free_green(x, y, k);
    ev.orders = {std::abs(ev.value)};
    ev.converged = true;
    return ev;
  }
  BornSolver solver(k, Q, y, o);
  GreenEvaluation ev = solver.evaluate(x);
  return ev;
}

ResolventTable solve_resolvent(const ComplexWavenumber& k, const FieldSpec& Q, const FieldSpec& f,
                               const std::vector<Point3>& rays, const std::vector<double>& radii,
                               const BornOptions& opt) {
  require(f.support.has_value(), ErrorKind::Precondition, "solve_resolvent: f must be compactly supported");
  require(f.support->center.norm() + f.support->radius <= 1.0 + 1e-12, ErrorKind::Precondition,
          "solve_resolvent: support of f must lie in the unit ball");
  require(!rays.empty() && !radii.empty(), ErrorKind::Parameter, "solve_resolvent: empty sample set");
  ResolventTable t;
  t.k = k;
  t.directions = rays;
  t.radii = radii;
  t.values = Eigen::MatrixXcd::Zero(rays.size(), radii.size());
  t.order_count = Eigen::MatrixXi::Zero(rays.size(), radii.size());
  t.converged.setConstant(rays.size(), radii.size(), false);
  {
    NodeSet ball;
    ball_nodes(f.support->center, f.support->radius, 24, 16, 32, false, ball);
    t.source_norm = std::sqrt(std::abs(ball.sum([&](const Point3& p) { return f.value(p) * f.value(p); })));
  }
  BornOptions o = opt;
  BornSolver solver(k, Q, f, o);
  t.diagnostics = solver.diagnostics();
  for (std::size_t i = 0; i < rays.size(); ++i) {
    const Point3 d = rays[i].normalized();
    for (std::size_t j = 0; j < radii.size(); ++j) {
      const GreenEvaluation ev = solver.evaluate(radii[j] * d);
      t.values(i, j) = ev.value;
      t.order_count(i, j) = static_cast<int>(ev.orders.size());
      t.converged(i, j) = ev.converged || Q.zero;
    }
  }
  return t;
}

ClassClDecomposition fit_class_cl(const ResolventTable& samples, double tolerance) {
  const std::size_t nr = samples.radii.size();
  require(nr >= 8, ErrorKind::InsufficientData, "fit_class_cl: need at least 8 sample radii");
  const auto [rmin, rmax] = std::minmax_element(samples.radii.begin(), samples.radii.end());
  require(*rmin > 0 && *rmax / *rmin >= 8.0 - 1e-9, ErrorKind::InsufficientData,
          "fit_class_cl: samples must cover 3 dyadic octaves");
  ClassClDecomposition out;
  out.tolerance = tolerance;
  out.radii = samples.radii;
  const Complex ik(-samples.k.delta, samples.k.tau);
  out.stripped.resize(samples.values.rows(), nr);
  for (Eigen::Index i = 0; i < samples.values.rows(); ++i)
    for (std::size_t j = 0; j < nr; ++j)
      out.stripped(i, j) = std::exp(-ik * samples.radii[j]) * samples.values(i, j);

  // Magnitudes averaged over directions in the log domain.
  std::vector<double> lr, lv, lrg, lg;
  for (std::size_t j = 0; j < nr; ++j) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < out.stripped.rows(); ++i) s += std::log(std::abs(out.stripped(i, j)) + 1e-300);
    lr.push_back(std::log(samples.radii[j]));
    lv.push_back(s / out.stripped.rows());
  }
  for (std::size_t j = 0; j + 1 < nr; ++j) {
    const double h = samples.radii[j + 1] - samples.radii[j];
    double s = 0.0;
    for (Eigen::Index i = 0; i < out.stripped.rows(); ++i)
      s += std::log(std::abs(out.stripped(i, j + 1) - out.stripped(i, j)) / h + 1e-300);
    lrg.push_back(std::log(0.5 * (samples.radii[j] + samples.radii[j + 1])));
    lg.push_back(s / out.stripped.rows());
  }
  const LinearFit fv = fit_line(lr, lv);
  const LinearFit fg = fit_line(lrg, lg);
  out.p_value = {-fv.slope, fv.r2, fv.r2 >= 0.9};
  out.p_grad = {-fg.slope, fg.r2, fg.r2 >= 0.9};
  out.group_a = out.p_value.exponent >= 1.5 - tolerance;
  out.group_b = out.p_value.exponent >= 1.0 - tolerance && out.p_grad.exponent >= 1.5 - tolerance;
  return out;
}

}  // namespace greenlab
