#include "greenlab/helmholtz.hpp"

#include <algorithm>

namespace greenlab {

namespace {

struct Pieces {
  Point3 near = Point3::Zero(), far = Point3::Zero();
  long nodes = 0;
};

// Radial window of the ray x + rω inside the support ball, or [0, R_t].
bool ray_window(const FieldSpec& V, const Point3& x, const Point3& w, double R_t, double& lo,
                double& hi) {
  lo = 0.0;
  hi = R_t;
  if (!V.support) return true;
  const Point3 c = V.support->center - x;
  const double b = c.dot(w);
  const double disc = b * b - (c.squaredNorm() - V.support->radius * V.support->radius);
  if (disc <= 0.0) return false;
  lo = std::max(0.0, b - std::sqrt(disc));
  hi = std::min(R_t, b + std::sqrt(disc));
  return hi > lo;
}

Pieces evaluate(const FieldSpec& V, const Point3& x, const HelmholtzOptions& opt, double R_t,
                int level) {
  Pieces out;
  const SphereRule& s = sphere_rule(opt.n_theta << level, opt.n_phi << level);
  const int nr = opt.n_radial << level;
  const double a = opt.split_radius;
  std::vector<double> breaks;
  for (std::size_t j = 0; j < s.dirs.size(); ++j) {
    const Point3& w = s.dirs[j];
    double lo, hi;
    if (!ray_window(V, x, w, R_t, lo, hi)) continue;
    breaks.clear();
    breaks.push_back(lo);
    if (a > lo && a < hi) breaks.push_back(a);
    const double L = hi - lo;
    const int panels = std::max(1, static_cast<int>(std::ceil(L)));
    for (int p = 1; p < panels; ++p) breaks.push_back(lo + L * p / panels);
    breaks.push_back(hi);
    std::sort(breaks.begin(), breaks.end());
    const Rule1D rr = composite_gauss(breaks, nr);
    double near = 0.0, far = 0.0;
    for (std::size_t i = 0; i < rr.x.size(); ++i) {
      const double v = rr.w[i] * V.value(x + rr.x[i] * w);
      (rr.x[i] < a ? near : far) += v;
    }
    out.near -= s.w[j] * near / (4.0 * pi) * w;
    out.far -= s.w[j] * far / (4.0 * pi) * w;
    out.nodes += static_cast<long>(rr.x.size());
  }
  return out;
}

}  // namespace

HelmholtzResult helmholtz_reconstruct(const FieldSpec& V, const Point3& x, const HelmholtzOptions& opt) {
  require(!V.is_vector(), ErrorKind::Parameter, "helmholtz_reconstruct: V must be scalar");
  require(opt.split_radius > 0, ErrorKind::Parameter, "helmholtz_reconstruct: split radius must be positive");
  HelmholtzResult res;
  if (V.zero) return res;
  const double R_t = V.support ? (V.support->center - x).norm() + V.support->radius
                               : opt.truncation_radius;
  res.truncation_radius = R_t;
  Pieces prev = evaluate(V, x, opt, R_t, 0);
  long nodes = prev.nodes;
  double err = 0.0;
  for (int level = 1; level <= std::max(1, opt.max_refinements); ++level) {
    Pieces cur = evaluate(V, x, opt, R_t, level);
    nodes += cur.nodes;
    err = ((cur.near + cur.far) - (prev.near + prev.far)).norm();
    const double scale = std::max(1.0, (cur.near + cur.far).norm());
    prev = cur;
    if (err <= opt.tol * scale) {
      res.Q_near = cur.near;
      res.Q_far = cur.far;
      res.Q = cur.near + cur.far;
      res.error = err;
      res.nodes = nodes;
      return res;
    }
  }
  throw AccuracyError("helmholtz_reconstruct: quadrature did not converge", err);
}

double helmholtz_divergence(const FieldSpec& V, const Point3& x, double h, const HelmholtzOptions& opt) {
  require(h > 0, ErrorKind::Parameter, "helmholtz_divergence: step must be positive");
  double d = 0.0;
  for (int i = 0; i < 3; ++i) {
    Point3 xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    d += (helmholtz_reconstruct(V, xp, opt).Q[i] - helmholtz_reconstruct(V, xm, opt).Q[i]) / (2.0 * h);
  }
  return d;
}

}  // namespace greenlab
