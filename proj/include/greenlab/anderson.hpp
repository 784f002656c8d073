#pragma once

#include <cstdint>
#include <iosfwd>
#include <unordered_map>

#include "greenlab/field.hpp"

namespace greenlab {

enum class SignLaw { Rademacher, Uniform };

// V(x) = Σ a_j ξ_j φ(x − x_j) with the standard bump φ of radius 1.
struct AndersonPotentialSpec {
  std::vector<Point3> centers;
  std::vector<double> amplitudes;
  SignLaw sign_law = SignLaw::Rademacher;
  std::uint64_t seed = 0;
  double eps = 0.25;

  std::size_t size() const { return centers.size(); }
  // Throws a spec error on overlapping centers or mismatched lists.
  void validate() const;
};

// Centers on spacing·ℤ³ inside |x| <= ball_radius, a_j = (1 + |x_j|)^{−0.5−eps}.
AndersonPotentialSpec lattice_anderson_spec(double ball_radius, double eps, double spacing = 3.0);

// ξ_j for the realization keyed by `seed`; a pure function of (law, seed, j).
double anderson_sign(SignLaw law, std::uint64_t seed, std::size_t j);

// Seed of the r-th realization in a Monte Carlo run keyed by `seed`.
std::uint64_t realization_seed(std::uint64_t seed, std::uint64_t r);

// Uniform-grid hash of the centers for neighbourhood queries.
class CenterIndex {
 public:
  CenterIndex() = default;
  CenterIndex(const std::vector<Point3>& centers, double cell);
  // Indices of centers with |x − x_j| < radius (radius <= cell).
  void near(const Point3& x, double radius, std::vector<std::size_t>& out) const;

 private:
  double cell_ = 1.0;
  const std::vector<Point3>* centers_ = nullptr;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> cells_;
  std::uint64_t key(long i, long j, long k) const;
};

FieldSpec sample_anderson(const AndersonPotentialSpec& spec, std::uint64_t seed);

// S(D) = ∫_{|D + x_j − y| > 1} (x−y)/(4π|x−y|³) φ(y − x_j) dy for D = x − x_j.
// Newton's theorem gives the exact value D ∫φ/(4π|D|³) once |D| >= 2.
Point3 bump_far_kernel(const Point3& D);

// c_j = a_j S_j(x) for every center.
void anderson_far_terms(const AndersonPotentialSpec& spec, const Point3& x, std::vector<Point3>& c);

// Q₂(x) = Σ ξ_j c_j for the realization keyed by seed.
Point3 anderson_Q2(const AndersonPotentialSpec& spec, const std::vector<Point3>& c, std::uint64_t seed);

void write_anderson_csv(const AndersonPotentialSpec& spec, std::uint64_t seed, std::ostream& os);

}  // namespace greenlab
