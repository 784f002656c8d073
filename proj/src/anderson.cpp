#include "greenlab/anderson.hpp"

#include <algorithm>
#include <cstdio>
#include <memory>
#include <ostream>

#include "greenlab/potentials.hpp"
#include "greenlab/quadrature.hpp"
#include "greenlab/rng.hpp"

namespace greenlab {

std::uint64_t CenterIndex::key(long i, long j, long k) const {
  const auto u = [](long v) { return static_cast<std::uint64_t>(v + (1L << 20)) & 0x1fffffULL; };
  return (u(i) << 42) | (u(j) << 21) | u(k);
}

CenterIndex::CenterIndex(const std::vector<Point3>& centers, double cell)
    : cell_(cell), centers_(&centers) {
  for (std::size_t n = 0; n < centers.size(); ++n) {
    const Point3& c = centers[n];
    cells_[key(std::lround(std::floor(c.x() / cell)), std::lround(std::floor(c.y() / cell)),
               std::lround(std::floor(c.z() / cell)))]
        .push_back(n);
  }
}

void CenterIndex::near(const Point3& x, double radius, std::vector<std::size_t>& out) const {
  out.clear();
  if (!centers_) return;
  const long i0 = std::lround(std::floor(x.x() / cell_));
  const long j0 = std::lround(std::floor(x.y() / cell_));
  const long k0 = std::lround(std::floor(x.z() / cell_));
  for (long i = i0 - 1; i <= i0 + 1; ++i)
    for (long j = j0 - 1; j <= j0 + 1; ++j)
      for (long k = k0 - 1; k <= k0 + 1; ++k) {
        auto it = cells_.find(key(i, j, k));
        if (it == cells_.end()) continue;
        for (std::size_t n : it->second)
          if (((*centers_)[n] - x).norm() < radius) out.push_back(n);
      }
  std::sort(out.begin(), out.end());
}

void AndersonPotentialSpec::validate() const {
  require(centers.size() == amplitudes.size(), ErrorKind::Spec,
          "anderson spec: centers and amplitudes differ in length");
  for (double a : amplitudes) require(a >= 0.0, ErrorKind::Spec, "anderson spec: negative amplitude");
  require(eps > 0.0, ErrorKind::Spec, "anderson spec: eps must be positive");
  CenterIndex index(centers, 2.0);
  std::vector<std::size_t> hits;
  for (std::size_t n = 0; n < centers.size(); ++n) {
    index.near(centers[n], 2.0 + 1e-12, hits);
    require(hits.size() == 1, ErrorKind::Spec, "anderson spec: centers closer than 2 (overlapping bumps)");
  }
}

AndersonPotentialSpec lattice_anderson_spec(double ball_radius, double eps, double spacing) {
  require(ball_radius > 0 && eps > 0, ErrorKind::Parameter, "lattice spec: bad radius or eps");
  require(spacing > 2.0, ErrorKind::Parameter, "lattice spec: spacing must exceed 2");
  AndersonPotentialSpec s;
  s.eps = eps;
  const long n = static_cast<long>(std::floor(ball_radius / spacing));
  for (long i = -n; i <= n; ++i)
    for (long j = -n; j <= n; ++j)
      for (long k = -n; k <= n; ++k) {
        const Point3 c = spacing * Point3(i, j, k);
        if (c.norm() > ball_radius) continue;
        s.centers.push_back(c);
        s.amplitudes.push_back(std::pow(1.0 + c.norm(), -0.5 - eps));
      }
  return s;
}

double anderson_sign(SignLaw law, std::uint64_t seed, std::size_t j) {
  const std::uint64_t h = splitmix64(splitmix64(seed) + 0x9e3779b97f4a7c15ULL * (j + 1));
  if (law == SignLaw::Rademacher) return (h >> 63) ? 1.0 : -1.0;
  return 2.0 * (static_cast<double>(h >> 11) * 0x1.0p-53) - 1.0;
}

std::uint64_t realization_seed(std::uint64_t seed, std::uint64_t r) {
  return splitmix64(seed ^ splitmix64(r + 0x632be59bd9b4e019ULL));
}

FieldSpec sample_anderson(const AndersonPotentialSpec& spec, std::uint64_t seed) {
  spec.validate();
  auto holder = std::make_shared<AndersonPotentialSpec>(spec);
  auto signs = std::make_shared<std::vector<double>>(spec.size());
  for (std::size_t j = 0; j < spec.size(); ++j) (*signs)[j] = anderson_sign(spec.sign_law, seed, j);
  auto index = std::make_shared<CenterIndex>(holder->centers, 2.0);
  FieldSpec V = FieldSpec::scalar(
      [holder, signs, index](const Point3& x) {
        thread_local std::vector<std::size_t> hits;
        index->near(x, 1.0, hits);
        double v = 0.0;
        for (std::size_t j : hits)
          v += holder->amplitudes[j] * (*signs)[j] * bump_profile((x - holder->centers[j]).norm());
        return v;
      },
      "anderson");
  bool all_zero = true;
  for (double a : spec.amplitudes) all_zero = all_zero && a == 0.0;
  V.zero = all_zero;
  V.envelope.eps = spec.eps;
  double m = 0.0;
  for (std::size_t j = 0; j < spec.size(); ++j) {
    // |V| <= a_j e^{-1} on the bump around x_j, and |x| <= |x_j| + 1 there.
    const double r = spec.centers[j].norm();
    m = std::max(m, spec.amplitudes[j] * std::exp(-1.0) * (1.0 + std::pow(r + 1.0, 0.5 + spec.eps)));
  }
  V.envelope.m = m;
  return V;
}

Point3 bump_far_kernel(const Point3& D) {
  const double rho = D.norm();
  if (rho == 0.0) return Point3::Zero();
  if (rho >= 2.0) return D * (bump_integral / (4.0 * pi * rho * rho * rho));
  // Axial symmetry about D: S = −(1/2) ∫_{r>1} dr ∫_{−1}^{1} u φ(|D + r ω|) du · D̂,
  // where u is the cosine between ω and D̂.
  const double r_lo = std::max(1.0, rho - 1.0), r_hi = rho + 1.0;
  const Rule1D rr = gauss_legendre_on(r_lo, r_hi, 48);
  double acc = 0.0;
  for (std::size_t i = 0; i < rr.x.size(); ++i) {
    const double r = rr.x[i];
    const double u_star = (1.0 - rho * rho - r * r) / (2.0 * rho * r);
    if (u_star <= -1.0) continue;
    const Rule1D ru = gauss_legendre_on(-1.0, std::min(1.0, u_star), 48);
    double inner = 0.0;
    for (std::size_t k = 0; k < ru.x.size(); ++k) {
      const double q = rho * rho + r * r + 2.0 * rho * r * ru.x[k];
      inner += ru.w[k] * ru.x[k] * bump_profile(std::sqrt(std::max(0.0, q)));
    }
    acc += rr.w[i] * inner;
  }
  return (-0.5 * acc / rho) * D;
}

void anderson_far_terms(const AndersonPotentialSpec& spec, const Point3& x, std::vector<Point3>& c) {
  c.resize(spec.size());
  for (std::size_t j = 0; j < spec.size(); ++j)
    c[j] = spec.amplitudes[j] * bump_far_kernel(x - spec.centers[j]);
}

Point3 anderson_Q2(const AndersonPotentialSpec& spec, const std::vector<Point3>& c, std::uint64_t seed) {
  Point3 q = Point3::Zero();
  for (std::size_t j = 0; j < c.size(); ++j) q += anderson_sign(spec.sign_law, seed, j) * c[j];
  return q;
}

void write_anderson_csv(const AndersonPotentialSpec& spec, std::uint64_t seed, std::ostream& os) {
  os << "x1,x2,x3,amplitude,sign\n";
  char buf[160];
  for (std::size_t j = 0; j < spec.size(); ++j) {
    const Point3& c = spec.centers[j];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", c.x(), c.y(), c.z(),
                  spec.amplitudes[j], anderson_sign(spec.sign_law, seed, j));
    os << buf;
  }
}

}  // namespace greenlab
