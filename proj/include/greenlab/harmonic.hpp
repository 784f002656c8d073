#pragma once

#include <cstdint>
#include <functional>

#include "greenlab/fit.hpp"
#include "greenlab/scattering.hpp"

namespace greenlab {

// Isosceles triangle over the base I = [a1, a2] with base angles π/γ₁.
// Edges run s1 → s2 (the base I), s2 → apex (I1) and apex → s1 (I2); the
// boundary is parameterized by arc length in that order.
struct TriangleDomain {
  double a1 = 0.0, a2 = 1.0;
  double gamma1 = 3.0;

  void validate() const;
  Complex s1() const { return {a1, 0.0}; }
  Complex s2() const { return {a2, 0.0}; }
  Complex apex() const;
  Complex vertex(int i) const;  // 0: s1, 1: s2, 2: apex
  double edge_length(int e) const;
  double perimeter() const;
  double diameter() const;
  bool contains(Complex z) const;  // open interior
  double boundary_distance(Complex z) const;
  // Nearest boundary point and its arc-length coordinate.
  double project(Complex z, Complex* foot = nullptr) const;
  Complex point_at(double arc) const;
  Complex centroid() const;
};

struct HarmonicMeasureEstimate {
  TriangleDomain triangle;
  Complex k0{};
  int bins_per_edge = 64;
  long n_walkers = 0;
  std::uint64_t seed = 0;
  double snap = 0.0;
  std::vector<long> counts;    // 3·bins_per_edge
  std::vector<double> masses;
  std::vector<double> stderrs; // binomial standard error per bin

  std::size_t bins() const { return counts.size(); }
  int edge_of(std::size_t bin) const { return static_cast<int>(bin) / bins_per_edge; }
  double bin_width(std::size_t bin) const;
  double bin_arc_center(std::size_t bin) const;
  Complex bin_center(std::size_t bin) const;
  double total_mass() const;
  double edge_mass(int edge) const;
};

struct HarmonicMeasureOptions {
  int bins_per_edge = 64;
  double snap_fraction = 1e-4;  // snap distance relative to diam(T)
};

// Walk-on-spheres from k0; walker i draws from CounterRng(seed, i).
HarmonicMeasureEstimate harmonic_measure(const TriangleDomain& T, Complex k0, long n_walkers,
                                         std::uint64_t seed, const HarmonicMeasureOptions& opt = {});

// Exponent p of the boundary density ω ~ t^p at distance t from s1 along the
// base, fitted on the first `n_bins` base bins weighted by their counts.
LinearFit endpoint_exponent(const HarmonicMeasureEstimate& omega, int n_bins = 16);

struct MeanValueGap {
  double gap = 0.0;
  double error = 0.0;  // Monte Carlo standard error of Σ ν·mass
};

// Σ_bins ν·mass − ν(k0).
double subharmonic_test(const std::vector<double>& nu_boundary, double nu_at_k0,
                        const HarmonicMeasureEstimate& omega);
MeanValueGap subharmonic_gap(const std::vector<double>& nu_boundary, double nu_at_k0,
                             const HarmonicMeasureEstimate& omega);

// Σ_{bins on I} mass·ln(density); −∞ if some density is 0.
double entropy_lower_bound(const std::vector<double>& densities, const HarmonicMeasureEstimate& omega);

struct PickK0Options {
  int rows = 12;
  int cols = 12;
  double threshold = 1e-6;  // relative to the sup of ‖A₀‖ over the grid
  int n_theta = 6, n_phi = 12;
};

// First interior grid point (rows from the apex down, left to right) where
// ‖A₀(k0,·)‖ exceeds threshold·sup.
Complex pick_k0(const FieldSpec& f, const TriangleDomain& T, const PickK0Options& opt = {});

struct EntropyCertificate {
  TriangleDomain triangle;
  Complex k0{};
  std::uint64_t seed = 0;
  long n_walkers = 0;
  int bins_per_edge = 0;
  double delta_proxy = 0.0;  // imaginary part used for real-axis amplitudes (0: exact)
  double rho = 0.0;          // truncation radius of the potential (0: free)
  std::vector<double> nu;    // ln‖A(s,·)‖ at bin centres
  double nu_k0 = 0.0;
  std::vector<double> densities;  // σ′(k²) on the base bins
  double mean_value_gap = 0.0;
  double gap_stderr = 0.0;
  double entropy_integral = 0.0;
  bool zero_density = false;
};

// Certificate for a given amplitude-norm map k ↦ ‖A(k,·)‖_{L²(Σ)}.
EntropyCertificate entropy_certificate(const std::function<double(Complex)>& amplitude_norm,
                                       const TriangleDomain& T, Complex k0, long n_walkers,
                                       std::uint64_t seed, const HarmonicMeasureOptions& opt = {});

// Free-source certificate using the closed-form amplitude.
EntropyCertificate free_entropy_certificate(const FieldSpec& f, const TriangleDomain& T, Complex k0,
                                            long n_walkers, std::uint64_t seed,
                                            const HarmonicMeasureOptions& opt = {},
                                            int n_theta = 8, int n_phi = 16);

}  // namespace greenlab
