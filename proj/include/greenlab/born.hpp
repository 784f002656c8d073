#pragma once

#include <memory>

#include "greenlab/green.hpp"

namespace greenlab {

// Calibrated replacement for the unknown constant in δ³ > C·m(Q); see
// calibrate_smallness for the recipe that produced it.
double calibrated_c_cal();

// Iterates live on a spherical product grid about the potential's support:
// composite GL radial panels × GL in θ × uniform φ. The grid doubles as the
// quadrature rule for far targets and as the interpolation grid for near ones.
struct BornGridSpec {
  int n_theta = 6;
  int n_phi = 12;
  int n_radial = 6;          // GL nodes per radial panel
  double panel_width = 0.5;  // upper bound on radial panel width
  double max_radius = 48.0;  // grid radius cap for non-compact Q
  int local_n_radial = 12;   // x-centred rule for targets inside the grid ball
  int local_n_theta = 8;
  int local_n_phi = 16;
  TwoCenterOptions order1{12, 12, 12, 6, 6};
  double far_margin = 1.0;   // targets this far outside the grid ball use the grid rule
};

struct BornOptions {
  double tol = 1e-10;  // absolute term magnitude that stops the series
  int n_max = 30;
  double c_cal = -1.0;  // < 0: use calibrated_c_cal()
  double eps = 0.5;     // envelope exponent used for m(Q)
  BornGridSpec grid;
  QuadratureSpec source_quad{24, 48, 16, 0, 1e-10, 1e-12};
  double truncation_tol = 1e-10;  // grid radius for non-compact Q: e^{−δR} below this
};

struct BornDiagnostics {
  std::vector<double> grid_norms;  // max |u_n| over grid nodes, n = first iterate..
  double observed_ratio = 0.0;     // geometric ratio of the last grid norms
  double m_Q = 0.0;                // max of the |Q| and |div Q| envelope constants
  double c_cal = 0.0;
  double smallness_ratio = 0.0;    // m(Q)·C_cal/δ³
  long grid_nodes = 0;
  double grid_radius = 0.0;
  Point3 grid_center = Point3::Zero();
  bool grid_converged = false;
};

struct GreenEvaluation {
  Point3 x = Point3::Zero(), y = Point3::Zero();
  ComplexWavenumber k;
  Complex value{};
  std::vector<double> orders;  // |term_n(x)|, n = 0, 1, ...
  bool converged = false;
  double smallness_ratio = 0.0;
};

// Envelope constant m(Q) = max(m(|Q|), m(|div Q|)) on the default envelope grid.
double born_envelope_constant(const FieldSpec& Q, double eps);

class BornSolver {
 public:
  // Source G⁰(·, y): the series Σ (−B)ⁿ G⁰(·, y).
  BornSolver(const ComplexWavenumber& k, const FieldSpec& Q, const Point3& y,
             const BornOptions& opt = {});
  // Volume source f: the series Σ (−B)ⁿ (G⁰ ∗ f).
  BornSolver(const ComplexWavenumber& k, const FieldSpec& Q, const FieldSpec& f,
             const BornOptions& opt = {});
  ~BornSolver();
  BornSolver(BornSolver&&) noexcept;

  // Terms (−B)ⁿ u₀ at x for n = 0..max_order (all available when max_order < 0).
  std::vector<Complex> terms(const Point3& x, int max_order = -1) const;
  // Partial sums until a term drops below tol.
  GreenEvaluation evaluate(const Point3& x) const;
  // (G⁰ ∗ f)(x) for volume sources, G⁰(x, y) for point sources.
  Complex source_field(const Point3& x) const;

  const BornDiagnostics& diagnostics() const;
  int available_orders() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

GreenEvaluation born_series_green(const ComplexWavenumber& k, const FieldSpec& Q, const Point3& x,
                                  const Point3& y, double tol = 1e-10, int n_max = 30,
                                  const BornOptions& opt = {});

struct ResolventTable {
  ComplexWavenumber k;
  std::vector<Point3> directions;
  std::vector<double> radii;
  Eigen::MatrixXcd values;      // directions × radii
  Eigen::MatrixXi order_count;  // terms summed per sample
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> converged;
  double source_norm = 0.0;     // ‖f‖₂, reported rather than enforced
  BornDiagnostics diagnostics;
};

// u = (H − z)⁻¹ f sampled on rays × radii. δ = 0 is accepted for compactly
// supported Q.
ResolventTable solve_resolvent(const ComplexWavenumber& k, const FieldSpec& Q, const FieldSpec& f,
                               const std::vector<Point3>& rays, const std::vector<double>& radii,
                               const BornOptions& opt = {});

struct PowerFit {
  double exponent = 0.0;
  double r2 = 0.0;
  bool reliable = false;
};

struct ClassClDecomposition {
  std::vector<double> radii;
  Eigen::MatrixXcd stripped;  // e^{−ik|x|} u(x), directions × radii
  PowerFit p_value;            // decay of |ψ|
  PowerFit p_grad;             // decay of |∂_r ψ|
  bool group_a = false;        // p_value >= 1.5 − tol
  bool group_b = false;        // p_value >= 1 − tol and p_grad >= 1.5 − tol
  double tolerance = 0.1;
};

ClassClDecomposition fit_class_cl(const ResolventTable& samples, double tolerance = 0.1);

}  // namespace greenlab
