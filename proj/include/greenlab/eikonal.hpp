#pragma once

#include <functional>
#include <optional>

#include "greenlab/field.hpp"

namespace greenlab {

// Rule for Gf(x) = |x|e^{k|x|} ∫ e^{−k(|x−y|+|y|)} f(y) / (4π|x−y||y|) dy.
// With s = |y| + |x−y|, t = |y| − |x−y| the measure dy/(|y||x−y|) becomes
// ds dt dφ/(2|x|), so Gf(x) = (8π)⁻¹ ∫ e^{−k(s−|x|)} f ds dt dφ. The s panels
// are graded in units of 1/k, the t panels geometrically towards both foci.
struct GQuadrature {
  int n_s = 8;       // GL nodes per s panel
  int n_t = 8;       // GL nodes per t panel
  int n_phi = 8;
  double tail = 40.0;  // integrate s − |x| up to tail/k

  GQuadrature refined(int factor) const;
};

struct ApplyGResult {
  double value = 0.0;
  long nodes = 0;
  double max_prefactor = 0.0;  // max over nodes of |x|e^{k|x|}e^{−k(|x−y|+|y|)}
};

// When `support` is a ball about the origin, its boundary is integrated exactly.
ApplyGResult apply_G(double k, const std::function<double(const Point3&)>& f, const Point3& x,
                     const GQuadrature& q = {}, const std::optional<SupportBall>& support = std::nullopt);

struct PhaseGridSpec {
  int n_r = 24;  // shells, uniform in ln r
  double r_min = 1.25, r_max = 32.0;
  int n_theta = 6;  // midpoints θ_j = π(j + ½)/n_theta
  int n_phi = 8;    // φ_l = 2πl/n_phi, even
  GQuadrature quad;

  void validate() const;
};

// Spherical product grid for μ. Values are indexed (i_r·n_theta + j)·n_phi + l.
class PhaseGrid {
 public:
  explicit PhaseGrid(const PhaseGridSpec& spec = {});

  const PhaseGridSpec& spec() const { return spec_; }
  std::size_t size() const { return r_.size() * th_.size() * ph_.size(); }
  std::size_t index(int i, int j, int l) const {
    return (static_cast<std::size_t>(i) * th_.size() + j) * ph_.size() + l;
  }
  Point3 point(int i, int j, int l) const;
  const std::vector<double>& radii() const { return r_; }
  const std::vector<double>& theta() const { return th_; }
  const std::vector<double>& phi() const { return ph_; }
  double h_log_r() const { return h_; }

  // Grid function at an arbitrary point: 4×4 Lagrange in (θ, φ) on each shell,
  // monotone cubic Hermite in ln r. Inside r_min the inner shell is continued
  // constantly, beyond r_max the outer shell decays like r⁻².
  double interpolate(const Eigen::VectorXd& values, const Point3& y) const;

  // Central differences; ghost values across the poles come from φ + π.
  struct Derivatives {
    Eigen::VectorXd dr, dtheta, dphi;  // ∂_r, ∂_θ, ∂_φ
  };
  Derivatives gradient(const Eigen::VectorXd& values) const;
  Eigen::VectorXd grad_squared(const Eigen::VectorXd& values) const;

  Eigen::VectorXd sample(const std::function<double(const Point3&)>& f) const;

 private:
  double value_at(const Eigen::VectorXd& v, int i, int j, int l) const;  // ghost-aware
  PhaseGridSpec spec_;
  std::vector<double> r_, th_, ph_;
  double h_ = 0.0;
};

struct PhaseCorrection {
  double k = 0.0;
  PhaseGrid grid;
  std::vector<Eigen::VectorXd> iterates;  // μ_0 = 0, μ_1, ...
  std::vector<double> diff_norms;         // max |μ_{n+1} − μ_n| over the grid

  int iteration() const { return static_cast<int>(iterates.size()) - 1; }
  const Eigen::VectorXd& values() const { return iterates.back(); }
  // ‖μ_{n+1} − μ_n‖ / ‖μ_n − μ_{n−1}‖ for n ≥ 1.
  double contraction_ratio(int n) const;
};

// μ_0 = 0, μ_{n+1} = −GV + G[|∇μ_n|²]. Throws Contraction when the difference
// norms grow twice in a row.
PhaseCorrection picard_iterate_mu(const FieldSpec& V, double k, int n_iter,
                                  const PhaseGridSpec& spec = {});

// max over interior shells of |Δμ + |∇μ|² − 2k∂_rμ − V − (2/r)∂_rμ| for the
// iterate `n` (the last one when n < 0).
double eikonal_residual(const PhaseCorrection& mu, const FieldSpec& V, double k, int n = -1);

}  // namespace greenlab
