#include "greenlab/quadrature.hpp"

#include <algorithm>
#include <map>
#include <mutex>

namespace greenlab {

void QuadratureSpec::validate() const {
  require(n_theta >= 4 && n_phi >= 4, ErrorKind::Parameter,
          "QuadratureSpec: n_theta and n_phi must be at least 4");
  require(n_radial >= 2, ErrorKind::Parameter, "QuadratureSpec: n_radial must be at least 2");
  require(tol > 0 && truncation_tol > 0, ErrorKind::Parameter, "QuadratureSpec: tol must be positive");
  require(max_refinements >= 0, ErrorKind::Parameter, "QuadratureSpec: max_refinements must be >= 0");
}

QuadratureSpec QuadratureSpec::refined(int factor) const {
  QuadratureSpec s = *this;
  s.n_theta *= factor;
  s.n_phi *= factor;
  s.n_radial *= factor;
  return s;
}

TwoCenterOptions TwoCenterOptions::refined(int factor) const {
  TwoCenterOptions o = *this;
  o.n_mu *= factor;
  o.n_nu *= factor;
  o.n_phi *= factor;
  return o;
}

namespace {

Rule1D compute_gauss_legendre(int n) {
  Rule1D r;
  r.x.resize(n);
  r.w.resize(n);
  if (n == 1) {
    r.x[0] = 0.0;
    r.w[0] = 2.0;
    return r;
  }
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    J(k, k - 1) = J(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J, Eigen::EigenvaluesOnly);
  for (int i = 0; i < n; ++i) {
    // Polish each eigenvalue with Newton steps on P_n and take the classical
    // weight formula, which is more accurate than squared eigenvector entries.
    double x = es.eigenvalues()[i];
    double dp = 1.0;
    for (int it = 0; it < 3; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      x -= p1 / dp;
    }
    r.x[i] = x;
    r.w[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

template <typename Compute>
QuadratureResult refine_until(const QuadratureSpec& spec, Compute compute) {
  QuadratureResult prev = compute(0);
  double err = 0.0;
  for (int level = 1; level <= std::max(1, spec.max_refinements); ++level) {
    QuadratureResult cur = compute(level);
    err = std::abs(cur.value - prev.value);
    cur.error = err;
    cur.refinements = level;
    cur.nodes += prev.nodes;
    if (err <= spec.tol * std::max(1.0, std::abs(cur.value))) return cur;
    prev = cur;
  }
  throw AccuracyError("quadrature refinement did not reach tolerance", err);
}

}  // namespace

const Rule1D& gauss_legendre(int n) {
  require(n >= 1, ErrorKind::Parameter, "gauss_legendre: n must be positive");
  static std::mutex mu;
  static std::map<int, Rule1D> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_gauss_legendre(n)).first;
  return it->second;
}

Rule1D gauss_legendre_on(double a, double b, int n) {
  const Rule1D& g = gauss_legendre(n);
  Rule1D r;
  r.x.resize(n);
  r.w.resize(n);
  const double h = 0.5 * (b - a), m = 0.5 * (a + b);
  for (int i = 0; i < n; ++i) {
    r.x[i] = m + h * g.x[i];
    r.w[i] = h * g.w[i];
  }
  return r;
}

Rule1D composite_gauss(const std::vector<double>& breaks, int n) {
  Rule1D r;
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    if (!(breaks[p + 1] > breaks[p])) continue;
    Rule1D q = gauss_legendre_on(breaks[p], breaks[p + 1], n);
    r.x.insert(r.x.end(), q.x.begin(), q.x.end());
    r.w.insert(r.w.end(), q.w.begin(), q.w.end());
  }
  return r;
}

const SphereRule& sphere_rule(int n_theta, int n_phi) {
  require(n_theta >= 1 && n_phi >= 1, ErrorKind::Parameter, "sphere_rule: sizes must be positive");
  static std::mutex mu;
  static std::map<std::pair<int, int>, SphereRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(n_theta, n_phi);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  SphereRule s;
  s.n_theta = n_theta;
  s.n_phi = n_phi;
  const Rule1D th = gauss_legendre_on(0.0, pi, n_theta);
  s.theta = th.x;
  for (int j = 0; j < n_phi; ++j) s.phi.push_back(2.0 * pi * (j + 0.5) / n_phi);
  for (int i = 0; i < n_theta; ++i) {
    const double st = std::sin(th.x[i]), ct = std::cos(th.x[i]);
    for (int j = 0; j < n_phi; ++j) {
      s.dirs.emplace_back(st * std::cos(s.phi[j]), st * std::sin(s.phi[j]), ct);
      s.w.push_back(th.w[i] * st * 2.0 * pi / n_phi);
    }
  }
  return cache.emplace(key, std::move(s)).first->second;
}

QuadratureResult integrate_sphere(const std::function<Complex(const Point3&)>& f, double rho,
                                  const QuadratureSpec& spec, const Point3& center) {
  spec.validate();
  require(rho > 0, ErrorKind::Parameter, "integrate_sphere: rho must be positive");
  return refine_until(spec, [&](int level) {
    const SphereRule& s = sphere_rule(spec.n_theta << level, spec.n_phi << level);
    Complex acc{};
    for (std::size_t i = 0; i < s.dirs.size(); ++i) acc += s.w[i] * f(center + rho * s.dirs[i]);
    QuadratureResult r;
    r.value = acc * (rho * rho);
    r.nodes = static_cast<long>(s.dirs.size());
    return r;
  });
}

void ball_nodes(const Point3& center, double radius, int n_radial, int n_theta, int n_phi,
                bool singular, NodeSet& out) {
  out.clear();
  const Rule1D rr = gauss_legendre_on(0.0, radius, n_radial);
  const SphereRule& s = sphere_rule(n_theta, n_phi);
  out.p.reserve(rr.x.size() * s.dirs.size());
  out.w.reserve(rr.x.size() * s.dirs.size());
  for (std::size_t i = 0; i < rr.x.size(); ++i) {
    const double r = rr.x[i];
    const double jac = singular ? r : r * r;
    for (std::size_t j = 0; j < s.dirs.size(); ++j) {
      out.p.push_back(center + r * s.dirs[j]);
      out.w.push_back(rr.w[i] * jac * s.w[j]);
    }
  }
}

namespace {

QuadratureResult integrate_ball_impl(const std::function<Complex(const Point3&)>& f,
                                     const Point3& center, double radius,
                                     const QuadratureSpec& spec, bool singular) {
  spec.validate();
  require(radius > 0, ErrorKind::Parameter, "ball integration: radius must be positive");
  NodeSet nodes;
  return refine_until(spec, [&](int level) {
    ball_nodes(center, radius, spec.n_radial << level, spec.n_theta << level,
               spec.n_phi << level, singular, nodes);
    QuadratureResult r;
    r.value = nodes.sum(f);
    r.nodes = static_cast<long>(nodes.size());
    return r;
  });
}

}  // namespace

QuadratureResult integrate_ball_singular(const std::function<Complex(const Point3&)>& f_smooth,
                                         const Point3& center, double radius,
                                         const QuadratureSpec& spec) {
  return integrate_ball_impl(f_smooth, center, radius, spec, true);
}

QuadratureResult integrate_ball(const std::function<Complex(const Point3&)>& f,
                                const Point3& center, double radius, const QuadratureSpec& spec) {
  return integrate_ball_impl(f, center, radius, spec, false);
}

double exterior_truncation_radius(double delta, double M, double tol) {
  require(delta > 0, ErrorKind::Divergence, "exterior integration needs positive damping");
  auto tail = [&](double R) {
    return 4.0 * pi * M * std::exp(-delta * R) *
           (R * R / delta + 2.0 * R / (delta * delta) + 2.0 / (delta * delta * delta));
  };
  if (M <= 0.0 || tail(0.0) < tol) return 0.0;
  double hi = 1.0 / delta;
  while (tail(hi) >= tol) hi *= 2.0;
  double lo = 0.0;
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    (tail(mid) >= tol ? lo : hi) = mid;
  }
  return hi;
}

QuadratureResult integrate_exterior(const std::function<Complex(const Point3&)>& f,
                                    double damping_delta, double M, const QuadratureSpec& spec,
                                    const RayBreaks& breaks) {
  spec.validate();
  require(damping_delta > 0, ErrorKind::Divergence, "integrate_exterior: damping must be positive");
  const double R = exterior_truncation_radius(damping_delta, M, spec.truncation_tol);
  if (R == 0.0) return {};
  const int panels = std::clamp(static_cast<int>(std::ceil(R * damping_delta / 2.0)), 1, 256);
  std::vector<double> base;
  for (int p = 0; p <= panels; ++p) base.push_back(R * p / panels);
  QuadratureResult res = refine_until(spec, [&](int level) {
    const SphereRule& s = sphere_rule(spec.n_theta << level, spec.n_phi << level);
    const int nr = spec.n_radial << level;
    Complex acc{};
    long count = 0;
    std::vector<double> b;
    for (std::size_t j = 0; j < s.dirs.size(); ++j) {
      b = base;
      if (breaks) {
        breaks(s.dirs[j], b);
        std::sort(b.begin(), b.end());
        b.erase(std::remove_if(b.begin(), b.end(), [R](double v) { return v < 0.0 || v > R; }),
                b.end());
        b.erase(std::unique(b.begin(), b.end()), b.end());
      }
      const Rule1D rr = composite_gauss(b, nr);
      Complex ray{};
      for (std::size_t i = 0; i < rr.x.size(); ++i)
        ray += rr.w[i] * rr.x[i] * rr.x[i] * f(rr.x[i] * s.dirs[j]);
      acc += s.w[j] * ray;
      count += static_cast<long>(rr.x.size());
    }
    QuadratureResult r;
    r.value = acc;
    r.nodes = count;
    return r;
  });
  res.truncation_radius = R;
  return res;
}

void two_center_nodes(const Point3& a, const Point3& b, double s_max,
                      const std::optional<SupportBall>& restrict, const TwoCenterOptions& opt,
                      NodeSet& out) {
  out.clear();
  const double d = (b - a).norm();
  const double scale = std::max({1.0, a.norm(), b.norm()});
  const SphereRule& sph = sphere_rule(opt.n_nu, opt.n_phi);

  if (d <= 1e-12 * scale) {
    // Coincident foci: spherical coordinates about a, integrand F(w)/r².
    double r_lo = 0.0, r_hi = 0.5 * s_max;
    if (restrict) {
      const double dc = (restrict->center - a).norm();
      r_lo = std::max(0.0, dc - restrict->radius);
      r_hi = std::min(r_hi, dc + restrict->radius);
    }
    if (!(r_hi > r_lo)) return;
    std::vector<double> br;
    for (int p = 0; p <= opt.mu_panels; ++p) br.push_back(r_lo + (r_hi - r_lo) * p / opt.mu_panels);
    const Rule1D rr = composite_gauss(br, opt.n_mu);
    for (std::size_t i = 0; i < rr.x.size(); ++i)
      for (std::size_t j = 0; j < sph.dirs.size(); ++j) {
        out.p.push_back(a + rr.x[i] * sph.dirs[j]);
        out.w.push_back(rr.w[i] * sph.w[j]);
      }
    return;
  }

  double s_lo = d, s_hi = s_max, t_lo = -d, t_hi = d;
  if (restrict) {
    const double ca = (restrict->center - a).norm(), cb = (restrict->center - b).norm();
    const double R = restrict->radius;
    s_lo = std::max(s_lo, ca + cb - 2.0 * R);
    s_hi = std::min(s_hi, ca + cb + 2.0 * R);
    t_lo = std::max(t_lo, ca - cb - 2.0 * R);
    t_hi = std::min(t_hi, ca - cb + 2.0 * R);
  }
  if (!(s_hi > s_lo) || !(t_hi > t_lo)) return;
  const double mu_lo = std::acosh(std::max(1.0, s_lo / d));
  const double mu_hi = std::acosh(std::max(1.0, s_hi / d));
  const double nu_lo = std::acos(std::clamp(t_hi / d, -1.0, 1.0));
  const double nu_hi = std::acos(std::clamp(t_lo / d, -1.0, 1.0));
  if (!(mu_hi > mu_lo) || !(nu_hi > nu_lo)) return;

  std::vector<double> bm, bn;
  for (int p = 0; p <= opt.mu_panels; ++p) bm.push_back(mu_lo + (mu_hi - mu_lo) * p / opt.mu_panels);
  for (int p = 0; p <= opt.nu_panels; ++p) bn.push_back(nu_lo + (nu_hi - nu_lo) * p / opt.nu_panels);
  const Rule1D rm = composite_gauss(bm, opt.n_mu);
  const Rule1D rn = composite_gauss(bn, opt.n_nu);

  const Point3 e = (b - a) / d;
  Point3 e1, e2;
  orthonormal_complement(e, e1, e2);
  const Point3 c = 0.5 * (a + b);
  const double h = 0.5 * d;
  std::vector<double> cphi(opt.n_phi), sphi(opt.n_phi);
  for (int k = 0; k < opt.n_phi; ++k) {
    const double phi = 2.0 * pi * (k + 0.5) / opt.n_phi;
    cphi[k] = std::cos(phi);
    sphi[k] = std::sin(phi);
  }
  const double wphi = 2.0 * pi / opt.n_phi;
  out.p.reserve(rm.x.size() * rn.x.size() * opt.n_phi);
  out.w.reserve(out.p.capacity());
  for (std::size_t i = 0; i < rm.x.size(); ++i) {
    const double ch = std::cosh(rm.x[i]), sh = std::sinh(rm.x[i]);
    for (std::size_t j = 0; j < rn.x.size(); ++j) {
      const double cn = std::cos(rn.x[j]), sn = std::sin(rn.x[j]);
      const double w = h * sh * sn * rm.w[i] * rn.w[j] * wphi;
      const Point3 axial = c + h * ch * cn * e;
      const double rad = h * sh * sn;
      for (int k = 0; k < opt.n_phi; ++k) {
        out.p.push_back(axial + rad * (cphi[k] * e1 + sphi[k] * e2));
        out.w.push_back(w);
      }
    }
  }
}

QuadratureResult integrate_two_center(const std::function<Complex(const Point3&)>& F,
                                      const Point3& a, const Point3& b, double s_max,
                                      const QuadratureSpec& spec,
                                      const std::optional<SupportBall>& restrict) {
  spec.validate();
  require(s_max > (b - a).norm(), ErrorKind::Parameter,
          "integrate_two_center: s_max must exceed the focal distance");
  TwoCenterOptions base;
  base.n_mu = spec.n_radial;
  base.n_nu = spec.n_theta;
  base.n_phi = spec.n_phi;
  NodeSet nodes;
  return refine_until(spec, [&](int level) {
    two_center_nodes(a, b, s_max, restrict, base.refined(1 << level), nodes);
    QuadratureResult r;
    r.value = nodes.sum(F);
    r.nodes = static_cast<long>(nodes.size());
    return r;
  });
}

bool in_region(RegionTag tag, const Point3& y, const Point3& x) {
  const double c = 2.0 * x.norm() / 3.0;
  switch (tag) {
    case RegionTag::Near: return y.norm() < c;
    case RegionTag::Shifted: return (y - x).norm() < c;
    case RegionTag::Upsilon: return y.norm() > c && (y - x).norm() > c;
  }
  return false;
}

}  // namespace greenlab
