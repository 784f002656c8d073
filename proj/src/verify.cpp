#include "greenlab/verify.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <map>

#include "greenlab/potentials.hpp"

namespace greenlab {

namespace {

void finish_series(BoundSeries& s, double stability) {
  std::map<double, double> by_x, by_rho;
  bool finite = true;
  for (const BoundSample& b : s.samples) {
    finite = finite && std::isfinite(b.ratio) && b.ratio > 0 && b.lhs >= 0;
    s.C = std::max(s.C, b.ratio);
    by_x[b.x] = std::max(by_x[b.x], b.ratio);
    by_rho[b.rho] = std::max(by_rho[b.rho], b.ratio);
  }
  auto spread = [](const std::map<double, double>& m) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& [k, v] : m) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    return hi / lo;
  };
  s.spread_x = spread(by_x);
  s.spread_rho = spread(by_rho);
  s.pass = finite && !s.samples.empty() && s.spread_x <= stability && s.spread_rho <= stability;
}

}  // namespace

BoundSweepReport lemma1_sweep(const std::vector<double>& deltas, const std::vector<double>& rhos,
                              const std::vector<double>& xs, const LemmaSweepOptions& opt) {
  BoundSweepReport rep;
  rep.bounds = {{"zeta^0: C/delta * rho", {}}, {"zeta^1: C/delta^1.5 * rho^0.5", {}},
                {"zeta^2: C/delta^2", {}}};
  for (double x : xs)
    for (double rho : rhos) {
      require(rho > 1.0 && rho < 2.0 * x / 3.0, ErrorKind::Parameter,
              "lemma1_sweep: need 1 < rho < 2|x|/3");
      for (double delta : deltas) {
        require(delta > 0, ErrorKind::Parameter, "lemma1_sweep: delta must be positive");
        const Point3 xv(0.0, 0.0, x);
        const double damp = std::exp(-delta * x);
        const double shapes[3] = {rho / delta * damp, std::sqrt(rho) * std::pow(delta, -1.5) * damp,
                                  damp / (delta * delta)};
        for (int p = 0; p < 3; ++p) {
          const QuadratureResult r = integrate_sphere(
              [&](const Point3& y) {
                const double z = p == 0 ? 1.0 : std::pow(angle_zeta(xv, y), p);
                return Complex(std::exp(-delta * ((xv - y).norm() + y.norm())) * z, 0.0);
              },
              rho, opt.quad);
          BoundSample s{delta, rho, x, r.value.real(), shapes[p], r.value.real() / shapes[p]};
          rep.bounds[p].samples.push_back(s);
        }
      }
    }
  rep.pass = true;
  for (BoundSeries& s : rep.bounds) {
    finish_series(s, opt.stability);
    rep.pass = rep.pass && s.pass;
  }
  return rep;
}

BoundSweepReport lemma1_default_sweep(const LemmaSweepOptions& opt) {
  BoundSweepReport rep;
  rep.bounds = {{"zeta^0: C/delta * rho", {}}, {"zeta^1: C/delta^1.5 * rho^0.5", {}},
                {"zeta^2: C/delta^2", {}}};
  for (double x : {4.0, 8.0, 16.0})
    for (double rho : {1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 10.0}) {
      if (!(rho < 2.0 * x / 3.0)) continue;
      const BoundSweepReport one = lemma1_sweep({0.2, 0.35, 0.5, 1.0}, {rho}, {x}, opt);
      for (int p = 0; p < 3; ++p)
        rep.bounds[p].samples.insert(rep.bounds[p].samples.end(), one.bounds[p].samples.begin(),
                                     one.bounds[p].samples.end());
    }
  rep.pass = true;
  for (BoundSeries& s : rep.bounds) {
    finish_series(s, opt.stability);
    rep.pass = rep.pass && s.pass;
  }
  return rep;
}

double lemma2_lhs(double delta, double x, const QuadratureSpec& quad) {
  require(x > 1.0, ErrorKind::Parameter, "lemma2_sweep: need |x| > 1");
  require(delta > 0, ErrorKind::Parameter, "lemma2_sweep: delta must be positive");
  // Focal coordinates s = |y| + |x−y|, t = |y| − |x−y| about 0 and x:
  // dy = (s² − t²)/(8|x|) ds dt dφ, and Υ becomes s ≥ 4|x|/3 + |t|, |t| ≤ |x|.
  const double c2 = 4.0 * x / 3.0;
  std::vector<double> ub{0.0};
  for (double m = 1.0; m <= 64.0; m *= 2.0) ub.push_back(m / delta);
  const Rule1D ur = composite_gauss(ub, quad.n_radial);
  const Rule1D tr = gauss_legendre_on(0.0, x, quad.n_radial);
  double acc = 0.0;
  for (std::size_t i = 0; i < tr.x.size(); ++i) {
    const double t = tr.x[i];
    double inner = 0.0;
    for (std::size_t j = 0; j < ur.x.size(); ++j) {
      const double s = c2 + t + ur.x[j];
      inner += ur.w[j] * std::exp(-delta * s) * (s * s - t * t);
    }
    acc += tr.w[i] * inner;
  }
  return 2.0 * acc * 2.0 * pi / (8.0 * x);
}

BoundSweepReport lemma2_sweep(const std::vector<double>& deltas, const std::vector<double>& xs,
                              const LemmaSweepOptions& opt) {
  BoundSweepReport rep;
  rep.bounds = {{"upsilon: C/delta^3 * exp(-gamma delta |x|)", {}}};
  std::vector<double> fx, fy;
  for (double x : xs)
    for (double delta : deltas) {
      const double lhs = lemma2_lhs(delta, x, opt.quad);
      const double shape = std::exp(-delta * x) / (delta * delta * delta);
      rep.bounds[0].samples.push_back({delta, 0.0, x, lhs, shape, lhs / shape});
      fx.push_back(-delta * x);
      fy.push_back(std::log(lhs) + 3.0 * std::log(delta));
    }
  const LinearFit f = fit_line(fx, fy);
  rep.gamma_fit = f.slope;
  rep.log_C_fit = f.intercept;
  rep.r2 = f.r2;
  BoundSeries& s = rep.bounds[0];
  for (const BoundSample& b : s.samples) s.C = std::max(s.C, b.ratio);
  s.pass = rep.gamma_fit > 1.0;
  rep.pass = s.pass;
  return rep;
}

TestFunction bump_test_function(double radius) {
  TestFunction t;
  t.value = [radius](const Point3& x) { return bump_profile(x.norm() / radius); };
  t.laplacian = [radius](const Point3& x) { return bump_profile_laplacian(x.norm() / radius) / (radius * radius); };
  t.support_radius = radius;
  return t;
}

TestFunction gaussian_test_function(double width, double cutoff) {
  require(width > 0 && cutoff > 0, ErrorKind::Parameter, "gaussian_test_function: width and cutoff must be positive");
  TestFunction t;
  const double a = 1.0 / (width * width);
  t.value = [a](const Point3& x) { return std::exp(-a * x.squaredNorm()); };
  t.laplacian = [a](const Point3& x) {
    const double r2 = x.squaredNorm();
    return (4.0 * a * a * r2 - 6.0 * a) * std::exp(-a * r2);
  };
  t.support_radius = cutoff * width;
  return t;
}

Eigen::Matrix4cd dirac_U() {
  const Complex I(0.0, 1.0);
  Eigen::Matrix4cd U;
  U << 1, 0, 0, -I,
       0, -I, 1, 0,
       0, -I, -1, 0,
       1, 0, 0, I;
  return U / std::sqrt(2.0);
}

namespace {

// Entries of L (±∂_axis) and M_v (±v_component); axis/component −1 marks a zero.
struct Entry {
  int sign, index;
};
constexpr Entry kL[4][4] = {{{0, -1}, {-1, 0}, {-1, 1}, {-1, 2}},
                            {{1, 0}, {0, -1}, {-1, 2}, {1, 1}},
                            {{1, 1}, {1, 2}, {0, -1}, {-1, 0}},
                            {{1, 2}, {-1, 1}, {1, 0}, {0, -1}}};
constexpr Entry kM[4][4] = {{{0, -1}, {-1, 0}, {-1, 1}, {-1, 2}},
                            {{1, 0}, {0, -1}, {1, 2}, {-1, 1}},
                            {{1, 1}, {-1, 2}, {0, -1}, {1, 0}},
                            {{1, 2}, {1, 1}, {-1, 0}, {0, -1}}};

struct CubeGrid {
  int n;  // points per axis
  double h, x0;
  std::size_t at(int i, int j, int k) const { return (static_cast<std::size_t>(i) * n + j) * n + k; }
  Point3 point(int i, int j, int k) const { return {x0 + i * h, x0 + j * h, x0 + k * h}; }
};

// (L + s·M_v) applied by central differences on interior points.
std::array<Eigen::VectorXd, 4> apply_block(const CubeGrid& g, const std::array<Eigen::VectorXd, 4>& in,
                                           const std::vector<Point3>& v, double s) {
  const std::size_t N = in[0].size();
  std::array<Eigen::VectorXd, 4> out;
  for (auto& o : out) o = Eigen::VectorXd::Zero(N);
  const int n = g.n;
  const std::size_t stride[3] = {static_cast<std::size_t>(n) * n, static_cast<std::size_t>(n), 1};
  for (int i = 1; i + 1 < n; ++i)
    for (int j = 1; j + 1 < n; ++j)
      for (int k = 1; k + 1 < n; ++k) {
        const std::size_t c = g.at(i, j, k);
        for (int r = 0; r < 4; ++r) {
          double acc = 0.0;
          for (int col = 0; col < 4; ++col) {
            const Entry l = kL[r][col], m = kM[r][col];
            if (l.sign != 0)
              acc += l.sign * (in[col][c + stride[l.index]] - in[col][c - stride[l.index]]) / (2.0 * g.h);
            if (m.sign != 0) acc += s * m.sign * v[c][m.index] * in[col][c];
          }
          out[r][c] = acc;
        }
      }
  return out;
}

}  // namespace

DiracReport dirac_factorization_check(const FieldSpec& v, double h, const TestFunction& psi) {
  require(v.is_vector() || v.zero, ErrorKind::Parameter, "dirac_factorization_check: v must be a vector field");
  require(h > 0, ErrorKind::Parameter, "dirac_factorization_check: h must be positive");
  require(psi.support_radius / h >= 4.0, ErrorKind::InsufficientData,
          "dirac_factorization_check: grid too coarse for the test function");
  DiracReport rep;
  rep.h = h;
  const double W = psi.support_radius + 3.0 * h;
  const int half = static_cast<int>(std::ceil(W / h));
  const CubeGrid g{2 * half + 1, h, -half * h};
  const std::size_t N = static_cast<std::size_t>(g.n) * g.n * g.n;
  rep.grid_points = static_cast<long>(N);

  std::vector<Point3> vv(N, Point3::Zero());
  std::array<Eigen::VectorXd, 4> top;
  for (auto& t : top) t = Eigen::VectorXd::Zero(N);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      for (int k = 0; k < g.n; ++k) {
        const Point3 p = g.point(i, j, k);
        const std::size_t c = g.at(i, j, k);
        top[0][c] = psi.value(p);
        if (!v.zero) vv[c] = v.vec(p);
      }
  // 𝒟(ψ, 0) = (0, (L − M_v)ψ), then 𝒟 again gives ((L + M_v)(L − M_v)ψ, 0).
  const auto bottom = apply_block(g, top, vv, -1.0);
  const auto result = apply_block(g, bottom, vv, 1.0);

  for (int i = 2; i + 2 < g.n; ++i)
    for (int j = 2; j + 2 < g.n; ++j)
      for (int k = 2; k + 2 < g.n; ++k) {
        const Point3 p = g.point(i, j, k);
        const std::size_t c = g.at(i, j, k);
        const double div = v.zero ? 0.0 : v.divergence(p);
        const double expect = -psi.laplacian(p) + (vv[c].squaredNorm() + div) * psi.value(p);
        rep.deviation = std::max(rep.deviation, std::abs(result[0][c] - expect));
        for (int r = 1; r < 4; ++r) rep.offdiag = std::max(rep.offdiag, std::abs(result[r][c]));
      }

  const Eigen::Matrix4cd U = dirac_U();
  Eigen::Matrix<Complex, 8, 8> Y = Eigen::Matrix<Complex, 8, 8>::Zero();
  Y.topRightCorner<4, 4>() = U;
  Y.bottomLeftCorner<4, 4>() = U;
  rep.unitary_error = std::max((U * U.adjoint() - Eigen::Matrix4cd::Identity()).cwiseAbs().maxCoeff(),
                               (Y * Y.adjoint() - Eigen::Matrix<Complex, 8, 8>::Identity()).cwiseAbs().maxCoeff());
  return rep;
}

double sign_moment(SignLaw law, int order) {
  require(order == 2 || order == 4, ErrorKind::Parameter, "sign_moment: order must be 2 or 4");
  if (law == SignLaw::Rademacher) return 1.0;
  return order == 2 ? 1.0 / 3.0 : 1.0 / 5.0;
}

namespace {

struct FarTermMoments {
  double s2 = 0.0;  // Σ|c_j|²
  double s4 = 0.0;  // Σ|c_j|⁴
  Eigen::Matrix3d M = Eigen::Matrix3d::Zero();  // Σ c_j c_jᵀ
};

// Q₂ at every point for every realization: rows 3·point + component, columns
// realizations. Centers are processed in blocks so memory stays bounded.
Eigen::MatrixXd q2_samples(const AndersonPotentialSpec& spec, const std::vector<Point3>& points,
                           const std::vector<std::uint64_t>& seeds, std::vector<FarTermMoments>* moments) {
  const std::size_t P = points.size(), R = seeds.size(), N = spec.size();
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(3 * P, R);
  if (moments) moments->assign(P, {});
  constexpr std::size_t block = 8192;
  Eigen::MatrixXd C, S;
  for (std::size_t b0 = 0; b0 < N; b0 += block) {
    const std::size_t nb = std::min(block, N - b0);
    C.resize(3 * P, nb);
    S.resize(nb, R);
    for (std::size_t p = 0; p < P; ++p)
      for (std::size_t j = 0; j < nb; ++j) {
        const Point3 c = spec.amplitudes[b0 + j] * bump_far_kernel(points[p] - spec.centers[b0 + j]);
        C.block<3, 1>(3 * p, j) = c;
        if (moments) {
          FarTermMoments& m = (*moments)[p];
          const double n2 = c.squaredNorm();
          m.s2 += n2;
          m.s4 += n2 * n2;
          m.M += c * c.transpose();
        }
      }
    for (std::size_t r = 0; r < R; ++r)
      for (std::size_t j = 0; j < nb; ++j) S(j, r) = anderson_sign(spec.sign_law, seeds[r], b0 + j);
    Q.noalias() += C * S;
  }
  return Q;
}

std::vector<std::uint64_t> realization_seeds(std::uint64_t seed, int n) {
  std::vector<std::uint64_t> s(n);
  for (int r = 0; r < n; ++r) s[r] = realization_seed(seed, static_cast<std::uint64_t>(r));
  return s;
}

LinearFit fit_against_log1p(const std::vector<double>& radii, const std::vector<double>& values) {
  std::vector<double> x, y;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    x.push_back(std::log1p(radii[i]));
    y.push_back(std::log(values[i]));
  }
  return fit_line(x, y);
}

}  // namespace

AndersonStatsReport anderson_decay_stats(const AndersonPotentialSpec& spec, int n_realizations,
                                         std::uint64_t seed, const AndersonStatsOptions& opt) {
  require(n_realizations >= 50, ErrorKind::Parameter, "anderson_decay_stats: need at least 50 realizations");
  spec.validate();
  AndersonStatsReport rep;
  rep.n_realizations = n_realizations;
  rep.seed = seed;
  rep.radii = opt.radii;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  bool all_zero = true;
  for (double a : spec.amplitudes) all_zero = all_zero && a == 0.0;
  if (all_zero || spec.size() == 0) {
    rep.undefined = true;
    rep.decay_exponent = rep.sup_exponent = nan;
    rep.mean_sq.assign(opt.radii.size(), 0.0);
    rep.odd_moments_vanish = true;
    return rep;
  }

  const std::vector<Point3> dirs = fibonacci_directions(opt.n_directions);
  const std::size_t D = dirs.size(), NR = opt.radii.size();
  std::vector<Point3> points;
  for (double r : opt.radii)
    for (const Point3& d : dirs) points.push_back(r * d);
  std::vector<FarTermMoments> mom;
  const auto seeds = realization_seeds(seed, n_realizations);
  const Eigen::MatrixXd Q = q2_samples(spec, points, seeds, &mom);
  const double m2 = sign_moment(spec.sign_law, 2);
  const double R = n_realizations;

  std::vector<std::vector<double>> sup(n_realizations, std::vector<double>(NR, 0.0));
  for (std::size_t ir = 0; ir < NR; ++ir) {
    double sum = 0.0, sum2 = 0.0, exact = 0.0;
    for (std::size_t id = 0; id < D; ++id) exact += m2 * mom[ir * D + id].s2 / D;
    for (int r = 0; r < n_realizations; ++r) {
      double avg = 0.0;
      for (std::size_t id = 0; id < D; ++id) {
        const double q2 = Q.block(3 * (ir * D + id), r, 3, 1).squaredNorm();
        avg += q2 / D;
        sup[r][ir] = std::max(sup[r][ir], std::sqrt(q2));
      }
      sum += avg;
      sum2 += avg * avg;
    }
    const double mean = sum / R;
    rep.mean_sq.push_back(mean);
    rep.mean_sq_stderr.push_back(std::sqrt(std::max(0.0, sum2 / R - mean * mean) / (R - 1.0)));
    rep.exact_sq.push_back(exact);
    for (int comp = 0; comp < 3; ++comp) {
      const Eigen::VectorXd row = Q.row(3 * (ir * D) + comp).transpose();
      const double mu = row.mean();
      const double sd = std::sqrt((row.array() - mu).square().sum() / (R - 1.0));
      const double z = sd > 0 ? mu / (sd / std::sqrt(R)) : 0.0;
      rep.mean_z_scores.push_back(z);
      rep.max_abs_z = std::max(rep.max_abs_z, std::abs(z));
    }
  }
  rep.odd_moments_vanish = rep.max_abs_z <= 3.0;
  rep.decay = fit_against_log1p(opt.radii, rep.mean_sq);
  rep.decay_exponent = -rep.decay.slope;

  std::vector<double> exps, sup_mean(NR, 0.0);
  for (int r = 0; r < n_realizations; ++r) {
    exps.push_back(-fit_against_log1p(opt.radii, sup[r]).slope);
    for (std::size_t ir = 0; ir < NR; ++ir) sup_mean[ir] += sup[r][ir] / R;
  }
  double em = 0.0, ev = 0.0;
  for (double e : exps) em += e / R;
  for (double e : exps) ev += (e - em) * (e - em) / (R - 1.0);
  rep.sup_exponent = em;
  rep.sup_exponent_stderr = std::sqrt(ev / R);
  rep.sup_decay = fit_against_log1p(opt.radii, sup_mean);

  // Differential of Q₂ by central differences at the first direction of each radius.
  if (opt.n_gradient_realizations > 0) {
    std::vector<Point3> gp;
    const double hs = opt.gradient_step;
    for (double r : opt.radii)
      for (int ax = 0; ax < 3; ++ax)
        for (double sgn : {1.0, -1.0}) gp.push_back(r * dirs[0] + sgn * hs * Point3::Unit(ax));
    const auto gseeds = realization_seeds(seed, opt.n_gradient_realizations);
    const Eigen::MatrixXd G = q2_samples(spec, gp, gseeds, nullptr);
    for (std::size_t ir = 0; ir < NR; ++ir) {
      double worst = 0.0;
      for (int r = 0; r < opt.n_gradient_realizations; ++r)
        for (int ax = 0; ax < 3; ++ax) {
          const std::size_t plus = ir * 6 + 2 * ax, minus = plus + 1;
          const Eigen::Vector3d dq = (G.block(3 * plus, r, 3, 1) - G.block(3 * minus, r, 3, 1)) / (2.0 * hs);
          worst = std::max(worst, dq.cwiseAbs().maxCoeff());
        }
      const double rr = opt.radii[ir];
      rep.gradient_ratio.push_back(worst / (std::log1p(rr) / std::pow(1.0 + rr, 0.5 + spec.eps)));
    }
  }
  return rep;
}

std::vector<Point3> lattice_sample_points(const std::vector<double>& radii) {
  std::vector<Point3> pts;
  for (double r : radii)
    for (const Point3& d : cube_directions()) {
      const Point3 k = (r * d).array().round().matrix();
      if (std::find(pts.begin(), pts.end(), k) == pts.end()) pts.push_back(k);
    }
  return pts;
}

MomentReport moment_bound_check(const AndersonPotentialSpec& spec, int p, const std::vector<Point3>& k_points,
                                int n_realizations, std::uint64_t seed) {
  require(p == 1 || p == 2, ErrorKind::Parameter, "moment_bound_check: p must be 1 or 2");
  require(n_realizations >= 50, ErrorKind::Parameter, "moment_bound_check: need at least 50 realizations");
  require(!k_points.empty(), ErrorKind::Parameter, "moment_bound_check: no sample points");
  spec.validate();
  MomentReport rep;
  rep.p = p;
  rep.points = k_points;
  rep.target = p * (1.0 + 2.0 * spec.eps);
  std::vector<FarTermMoments> mom;
  const Eigen::MatrixXd Q = q2_samples(spec, k_points, realization_seeds(seed, n_realizations), &mom);
  const double m2 = sign_moment(spec.sign_law, 2), m4 = sign_moment(spec.sign_law, 4);
  const double R = n_realizations;
  for (std::size_t i = 0; i < k_points.size(); ++i) {
    double s = 0.0, s2 = 0.0;
    for (int r = 0; r < n_realizations; ++r) {
      const double v = std::pow(Q.block(3 * i, r, 3, 1).squaredNorm(), p);
      s += v;
      s2 += v * v;
    }
    const double mean = s / R;
    rep.radii.push_back(k_points[i].norm());
    rep.empirical.push_back(mean);
    rep.standard_error.push_back(std::sqrt(std::max(0.0, s2 / R - mean * mean) / (R - 1.0)));
    const FarTermMoments& m = mom[i];
    rep.exact.push_back(p == 1 ? m2 * m.s2
                               : m2 * m2 * (m.s2 * m.s2 + 2.0 * (m.M * m.M).trace()) +
                                     (m4 - 3.0 * m2 * m2) * m.s4);
  }
  rep.fit = fit_against_log1p(rep.radii, rep.empirical);
  rep.exponent = -rep.fit.slope;
  return rep;
}

}  // namespace greenlab
