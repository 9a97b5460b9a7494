/**
 * @file conformal.hpp
 * @brief Moduli of annuli, Grötzsch superadditivity, Koebe distortion
 *        measurements and modulus bounds under quasi-conformal maps.
 *
 * Moduli use the ln R convention: mod{1 < |z| < R} = ln R.
 */
#pragma once

#include <functional>
#include <vector>

#include "bctk/rational_map.hpp"

namespace bctk {

/// Region between two Jordan polylines of a planar chart.
struct AnnulusRegion {
  std::vector<Complex> outer;
  std::vector<Complex> inner;
  PlanarChart chart;

  /// Throws PreconditionError unless both polylines are simple, disjoint
  /// and the inner one lies inside the outer one.
  void validate() const;
  /// Round annulus r < |z - center| < R sampled at @p samples vertices.
  static AnnulusRegion round(Complex center, double r, double R, int samples = 512);
};

double modulus_round(double r, double R);

struct ModulusOptions {
  int grid = 256;  ///< nodes per side, >= 64
  double tolerance = 1e-10;
  int max_sweeps = 100000;
};

struct ModulusEstimate {
  double lower = 0.0;     ///< inscribed round annulus
  double upper = 0.0;     ///< circumscribed round annulus
  double estimate = 0.0;  ///< raw clamped into [lower, upper]
  double raw = 0.0;       ///< 2 pi / E
  double energy = 0.0;
  double spacing = 0.0;
  int sweeps = 0;
  bool clamped = false;
  double width() const { return upper - lower; }
};

/// Discrete Dirichlet problem, 0 on the inner and 1 on the outer boundary,
/// solved by SOR on a resistor network with cut edges at the polylines.
ModulusEstimate modulus_estimate(const AnnulusRegion& A, const ModulusOptions& opt = {});

struct GrotzschReport {
  double modulus = 0.0;  ///< estimate for A
  std::vector<double> sub_moduli;
  double residual = 0.0;   ///< mod(A) - sum mod(A_i)
  double tolerance = 0.0;  ///< sum of bracket widths
  Verdict verdict = Verdict::Undetermined;
};

/// Sub-annuli must lie in A, separate its boundary components and be
/// pairwise nested with disjoint interiors.
GrotzschReport grotzsch_check(const AnnulusRegion& A, const std::vector<AnnulusRegion>& subannuli,
                              const ModulusOptions& opt = {});

/// Conformal map phi on the planar disk B(z0, r).
struct KoebeSample {
  std::function<Complex(Complex)> phi;
  std::function<Complex(Complex)> dphi;
  Complex z0;
  double r = 0.0;
};

/// Inverse branch of R^n on B(z0, r) with phi(z0) = xi. The chain of
/// pull-backs of a chordal ball around the disk must be univalent.
KoebeSample pullback_koebe_sample(const RationalMap& R, int n, Complex z0, double r, Complex xi);

struct KoebeRow {
  double distortion = 1.0;
  double guard_diameter = 0.0;  ///< lower bound for diam of the image complement
};

struct KoebeReport {
  double epsilon = 0.0;
  double distortion = 1.0;       ///< max over samples at epsilon
  double distortion_half = 1.0;  ///< at epsilon / 2
  double bound = 1.0;            ///< ((1 + eps) / (1 - eps))^4
  double slope = 0.0;            ///< (distortion - 1) / epsilon
  double slope_half = 0.0;
  bool within_bound = true;
  bool trend = true;  ///< distortion_half - 1 <= (distortion - 1)(1 + eps) / 2
  std::vector<KoebeRow> samples;
};

/// Sup/inf of |phi'| over a polar mesh of B(z0, eps r), maximized over the
/// samples.
KoebeReport koebe_calibration(const std::vector<KoebeSample>& samples, double epsilon, int radial = 16,
                              int angular = 64);

struct ModulusBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// Bounds for mod(chi(A)) when chi is K-qc and conformal off a set of flat
/// area @p area_N.
ModulusBounds qc_modulus_bounds(double K, double area_N, double modA);

}  // namespace bctk
