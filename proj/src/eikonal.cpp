#include "greenlab/eikonal.hpp"

#include <algorithm>

#include "greenlab/quadrature.hpp"

namespace greenlab {

GQuadrature GQuadrature::refined(int factor) const {
  GQuadrature q = *this;
  q.n_s *= factor;
  q.n_t *= factor;
  q.n_phi *= factor;
  return q;
}

namespace {

// Breakpoints on [lo, hi] refined geometrically towards both ends.
std::vector<double> graded_breaks(double lo, double hi) {
  std::vector<double> left{lo}, right{hi};
  for (double step = 0.5; lo + step < 0.5 * (lo + hi); step *= 2.0) {
    left.push_back(lo + step);
    right.push_back(hi - step);
  }
  left.insert(left.end(), right.rbegin(), right.rend());
  return left;
}

}  // namespace

ApplyGResult apply_G(double k, const std::function<double(const Point3&)>& f, const Point3& x,
                     const GQuadrature& q, const std::optional<SupportBall>& support) {
  require(k > 0, ErrorKind::Parameter, "apply_G: k must be positive");
  const double d = x.norm();
  require(d > 1.0, ErrorKind::Domain, "apply_G: |x| must exceed 1");
  const Point3 e = x / d;
  Point3 e1, e2;
  orthonormal_complement(e, e1, e2);

  // (s, t) box from the support ball; a ball about the origin gives t <= 2ρ − s exactly.
  double s_lo = d, s_hi = d + q.tail / k, t_lo = -d, t_hi = d;
  bool origin_ball = false;
  double rho = 0.0;
  if (support) {
    const double ca = support->center.norm(), cb = (support->center - x).norm(), R = support->radius;
    s_lo = std::max(s_lo, ca + cb - 2.0 * R);
    s_hi = std::min(s_hi, ca + cb + 2.0 * R);
    t_lo = std::max(t_lo, ca - cb - 2.0 * R);
    t_hi = std::min(t_hi, ca - cb + 2.0 * R);
    origin_ball = ca <= 1e-12 * std::max(1.0, d);
    rho = R;
  }
  ApplyGResult out;
  if (!(s_hi > s_lo) || !(t_hi > t_lo)) return out;

  std::vector<double> sb{s_lo};
  for (double m = 0.5; d + m / k < s_hi; m = 2.0 * m + 0.5)
    if (d + m / k > s_lo) sb.push_back(d + m / k);
  if (origin_ball && 2.0 * rho - d > s_lo && 2.0 * rho - d < s_hi) sb.push_back(2.0 * rho - d);
  sb.push_back(s_hi);
  std::sort(sb.begin(), sb.end());
  sb.erase(std::unique(sb.begin(), sb.end()), sb.end());
  const Rule1D rs = composite_gauss(sb, q.n_s);

  std::vector<double> cphi(q.n_phi), sphi(q.n_phi);
  for (int l = 0; l < q.n_phi; ++l) {
    const double phi = 2.0 * pi * (l + 0.5) / q.n_phi;
    cphi[l] = std::cos(phi);
    sphi[l] = std::sin(phi);
  }
  const double wphi = 2.0 * pi / q.n_phi;
  double acc = 0.0;
  for (std::size_t is = 0; is < rs.x.size(); ++is) {
    const double s = rs.x[is];
    const double damp = std::exp(-k * (s - d));
    out.max_prefactor = std::max(out.max_prefactor, d * damp);
    const double th = origin_ball ? std::min(t_hi, 2.0 * rho - s) : t_hi;
    if (!(th > t_lo)) continue;
    const Rule1D rt = composite_gauss(graded_breaks(t_lo, th), q.n_t);
    for (std::size_t it = 0; it < rt.x.size(); ++it) {
      const double t = rt.x[it];
      const double axial = 0.5 * d + s * t / (2.0 * d);
      const double perp = std::sqrt(std::max(0.0, (s * s - d * d) * (d * d - t * t))) / (2.0 * d);
      double ring = 0.0;
      for (int l = 0; l < q.n_phi; ++l) ring += f(axial * e + perp * (cphi[l] * e1 + sphi[l] * e2));
      acc += rs.w[is] * rt.w[it] * damp * ring * wphi;
      out.nodes += q.n_phi;
    }
  }
  out.value = acc / (8.0 * pi);
  return out;
}

void PhaseGridSpec::validate() const {
  require(n_r >= 2 && n_theta >= 2 && n_phi >= 4, ErrorKind::Parameter, "PhaseGridSpec: grid too small");
  require(n_phi % 2 == 0, ErrorKind::Parameter, "PhaseGridSpec: n_phi must be even");
  require(r_min > 1.0 && r_max > r_min, ErrorKind::Parameter, "PhaseGridSpec: need 1 < r_min < r_max");
}

PhaseGrid::PhaseGrid(const PhaseGridSpec& spec) : spec_(spec) {
  spec_.validate();
  h_ = std::log(spec.r_max / spec.r_min) / (spec.n_r - 1);
  for (int i = 0; i < spec.n_r; ++i) r_.push_back(spec.r_min * std::exp(h_ * i));
  r_.back() = spec.r_max;
  for (int j = 0; j < spec.n_theta; ++j) th_.push_back(pi * (j + 0.5) / spec.n_theta);
  for (int l = 0; l < spec.n_phi; ++l) ph_.push_back(2.0 * pi * l / spec.n_phi);
}

Point3 PhaseGrid::point(int i, int j, int l) const {
  const double st = std::sin(th_[j]);
  return r_[i] * Point3(st * std::cos(ph_[l]), st * std::sin(ph_[l]), std::cos(th_[j]));
}

Eigen::VectorXd PhaseGrid::sample(const std::function<double(const Point3&)>& f) const {
  Eigen::VectorXd v(size());
  for (std::size_t i = 0; i < r_.size(); ++i)
    for (std::size_t j = 0; j < th_.size(); ++j)
      for (std::size_t l = 0; l < ph_.size(); ++l) v[index(i, j, l)] = f(point(i, j, l));
  return v;
}

double PhaseGrid::value_at(const Eigen::VectorXd& v, int i, int j, int l) const {
  const int nt = static_cast<int>(th_.size()), np = static_cast<int>(ph_.size());
  if (j < 0) {
    j = -1 - j;
    l += np / 2;
  } else if (j >= nt) {
    j = 2 * nt - 1 - j;
    l += np / 2;
  }
  l = ((l % np) + np) % np;
  return v[index(i, j, l)];
}

double PhaseGrid::interpolate(const Eigen::VectorXd& values, const Point3& y) const {
  const double r = y.norm();
  const double theta = r > 0 ? std::acos(std::clamp(y.z() / r, -1.0, 1.0)) : 0.0;
  double phi = std::atan2(y.y(), y.x());
  if (phi < 0) phi += 2.0 * pi;
  const int nt = static_cast<int>(th_.size()), np = static_cast<int>(ph_.size());
  const double dth = pi / nt, dph = 2.0 * pi / np;

  const int j0 = static_cast<int>(std::floor(theta / dth - 0.5)) - 1;
  const int l0 = static_cast<int>(std::floor(phi / dph)) - 1;
  double wt[4], wp[4];
  for (int a = 0; a < 4; ++a) {
    wt[a] = wp[a] = 1.0;
    for (int b = 0; b < 4; ++b) {
      if (b == a) continue;
      wt[a] *= (theta - (j0 + b + 0.5) * dth) / ((a - b) * dth);
      wp[a] *= (phi - (l0 + b) * dph) / ((a - b) * dph);
    }
  }
  auto shell = [&](int i) {
    double s = 0.0;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) s += wt[a] * wp[b] * value_at(values, i, j0 + a, l0 + b);
    return s;
  };

  const int n = static_cast<int>(r_.size());
  if (r <= r_.front()) return shell(0);
  if (r >= r_.back()) {
    const double q = r_.back() / r;
    return shell(n - 1) * q * q;
  }
  const double u = std::log(r / r_.front()) / h_;
  const int i0 = std::clamp(static_cast<int>(std::floor(u)), 0, n - 2);
  double A[4];
  bool have[4];
  for (int a = 0; a < 4; ++a) {
    const int i = i0 - 1 + a;
    have[a] = i >= 0 && i < n;
    A[a] = have[a] ? shell(i) : 0.0;
  }
  // Fritsch–Carlson slopes (per unit of u) at shells i0 and i0 + 1.
  auto slope = [&](int a) {
    const bool left = have[a - 1], right = have[a + 1];
    const double dl = left ? A[a] - A[a - 1] : 0.0, dr = right ? A[a + 1] - A[a] : 0.0;
    if (!left) return dr;
    if (!right) return dl;
    if (dl * dr <= 0.0) return 0.0;
    return 2.0 * dl * dr / (dl + dr);
  };
  const double m0 = slope(1), m1 = slope(2);
  const double t = u - i0, t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * A[1] + (t3 - 2 * t2 + t) * m0 + (-2 * t3 + 3 * t2) * A[2] + (t3 - t2) * m1;
}

PhaseGrid::Derivatives PhaseGrid::gradient(const Eigen::VectorXd& v) const {
  const int n = static_cast<int>(r_.size()), nt = static_cast<int>(th_.size()), np = static_cast<int>(ph_.size());
  const double dth = pi / nt, dph = 2.0 * pi / np;
  Derivatives D;
  D.dr.resize(size());
  D.dtheta.resize(size());
  D.dphi.resize(size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < nt; ++j)
      for (int l = 0; l < np; ++l) {
        const std::size_t c = index(i, j, l);
        double du;
        if (i == 0)
          du = (-3.0 * v[c] + 4.0 * v[index(1, j, l)] - v[index(2 < n ? 2 : 1, j, l)]) / (2.0 * h_);
        else if (i == n - 1)
          du = (3.0 * v[c] - 4.0 * v[index(n - 2, j, l)] + v[index(n >= 3 ? n - 3 : 0, j, l)]) / (2.0 * h_);
        else
          du = (v[index(i + 1, j, l)] - v[index(i - 1, j, l)]) / (2.0 * h_);
        D.dr[c] = du / r_[i];
        D.dtheta[c] = (value_at(v, i, j + 1, l) - value_at(v, i, j - 1, l)) / (2.0 * dth);
        D.dphi[c] = (value_at(v, i, j, l + 1) - value_at(v, i, j, l - 1)) / (2.0 * dph);
      }
  return D;
}

Eigen::VectorXd PhaseGrid::grad_squared(const Eigen::VectorXd& v) const {
  const Derivatives D = gradient(v);
  Eigen::VectorXd g(size());
  for (std::size_t i = 0; i < r_.size(); ++i)
    for (std::size_t j = 0; j < th_.size(); ++j)
      for (std::size_t l = 0; l < ph_.size(); ++l) {
        const std::size_t c = index(i, j, l);
        const double a = D.dtheta[c] / r_[i], b = D.dphi[c] / (r_[i] * std::sin(th_[j]));
        g[c] = D.dr[c] * D.dr[c] + a * a + b * b;
      }
  return g;
}

double PhaseCorrection::contraction_ratio(int n) const {
  require(n >= 1 && n < static_cast<int>(diff_norms.size()), ErrorKind::Parameter,
          "contraction_ratio: iterate out of range");
  return diff_norms[n] / diff_norms[n - 1];
}

PhaseCorrection picard_iterate_mu(const FieldSpec& V, double k, int n_iter, const PhaseGridSpec& spec) {
  require(k >= 5.0, ErrorKind::Parameter, "picard_iterate_mu: k must be at least 5");
  require(n_iter >= 1, ErrorKind::Parameter, "picard_iterate_mu: n_iter must be positive");
  require(V.zero || V.envelope.eps > 0.0, ErrorKind::Precondition,
          "picard_iterate_mu: V needs an envelope exponent above 0.5");
  PhaseCorrection mu{k, PhaseGrid(spec), {}, {}};
  const PhaseGrid& grid = mu.grid;
  const std::size_t N = grid.size();
  const int n = spec.n_r, nt = spec.n_theta, np = spec.n_phi;

  auto apply_on_grid = [&](const std::function<double(const Point3&)>& f,
                           const std::optional<SupportBall>& support) {
    Eigen::VectorXd out(N);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < nt; ++j)
        for (int l = 0; l < np; ++l)
          out[grid.index(i, j, l)] = apply_G(k, f, grid.point(i, j, l), spec.quad, support).value;
    return out;
  };

  const Eigen::VectorXd gv = V.zero ? Eigen::VectorXd::Zero(N)
                                    : apply_on_grid([&](const Point3& y) { return V.value(y); }, V.support);
  mu.iterates.push_back(Eigen::VectorXd::Zero(N));
  for (int step = 0; step < n_iter; ++step) {
    const Eigen::VectorXd g = grid.grad_squared(mu.iterates.back());
    Eigen::VectorXd next = -gv;
    if (g.cwiseAbs().maxCoeff() > 0.0)
      next += apply_on_grid([&](const Point3& y) { return grid.interpolate(g, y); }, std::nullopt);
    mu.diff_norms.push_back((next - mu.iterates.back()).cwiseAbs().maxCoeff());
    mu.iterates.push_back(std::move(next));
    const auto& dn = mu.diff_norms;
    const std::size_t m = dn.size();
    if (m >= 3 && dn[m - 1] > dn[m - 2] && dn[m - 2] > dn[m - 3])
      throw Error(ErrorKind::Contraction, "picard_iterate_mu: difference norms grew twice in a row");
  }
  return mu;
}

double eikonal_residual(const PhaseCorrection& mu, const FieldSpec& V, double k, int n) {
  const PhaseGrid& grid = mu.grid;
  const PhaseGridSpec& spec = grid.spec();
  require(spec.n_r >= 5 && spec.n_theta >= 5 && spec.n_phi >= 5, ErrorKind::InsufficientData,
          "eikonal_residual: need at least 5 grid points per direction");
  if (n < 0) n = mu.iteration();
  require(n < static_cast<int>(mu.iterates.size()), ErrorKind::Parameter, "eikonal_residual: no such iterate");
  const Eigen::VectorXd& v = mu.iterates[n];
  const double h = grid.h_log_r(), dth = pi / spec.n_theta, dph = 2.0 * pi / spec.n_phi;
  const auto& r = grid.radii();
  const auto& th = grid.theta();
  double worst = 0.0;
  for (int i = 1; i + 1 < spec.n_r; ++i)
    for (int j = 0; j < spec.n_theta; ++j)
      for (int l = 0; l < spec.n_phi; ++l) {
        const double c = v[grid.index(i, j, l)];
        const double up = v[grid.index(i + 1, j, l)], um = v[grid.index(i - 1, j, l)];
        const double du = (up - um) / (2.0 * h), duu = (up - 2.0 * c + um) / (h * h);
        const double dr = du / r[i], drr = (duu - du) / (r[i] * r[i]);
        // θ and φ neighbours, with pole ghosts taken from φ + π.
        auto at = [&](int jj, int ll) {
          int lp = ll;
          if (jj < 0) {
            jj = -1 - jj;
            lp += spec.n_phi / 2;
          } else if (jj >= spec.n_theta) {
            jj = 2 * spec.n_theta - 1 - jj;
            lp += spec.n_phi / 2;
          }
          lp = ((lp % spec.n_phi) + spec.n_phi) % spec.n_phi;
          return v[grid.index(i, jj, lp)];
        };
        const double thp = at(j + 1, l), thm = at(j - 1, l), php = at(j, l + 1), phm = at(j, l - 1);
        const double dt = (thp - thm) / (2.0 * dth), dtt = (thp - 2.0 * c + thm) / (dth * dth);
        const double dp = (php - phm) / (2.0 * dph), dpp = (php - 2.0 * c + phm) / (dph * dph);
        const double s = std::sin(th[j]), ct = std::cos(th[j]) / s;
        const double lap = drr + 2.0 / r[i] * dr + (dtt + ct * dt + dpp / (s * s)) / (r[i] * r[i]);
        const double grad2 = dr * dr + dt * dt / (r[i] * r[i]) + dp * dp / (r[i] * r[i] * s * s);
        const double res = lap + grad2 - 2.0 * k * dr - V.value(grid.point(i, j, l)) - 2.0 / r[i] * dr;
        worst = std::max(worst, std::abs(res));
      }
  return worst;
}

}  // namespace greenlab
