/**
 * @file sphere.hpp
 * @brief Points of the Riemann sphere in two affine charts, the chordal
 *        metric and unitary Möbius rotations.
 */
#pragma once

#include <array>
#include <utility>
#include <vector>

#include "bctk/core.hpp"

namespace bctk {

/// Finite: value is z. Inverted: value is w = 1/z, so w = 0 is infinity.
enum class Chart { Finite, Inverted };

class SpherePoint {
 public:
  SpherePoint() = default;
  SpherePoint(Complex value, Chart chart) : value_(value), chart_(chart) {}

  /// Canonical representative: the chart in which |value| <= 1.
  static SpherePoint from_complex(Complex z);
  static SpherePoint infinity() { return {Complex(0.0, 0.0), Chart::Inverted}; }
  /// Point [x : y]; (x, y) must not both vanish.
  static SpherePoint from_homogeneous(Complex x, Complex y);

  Complex value() const { return value_; }
  Chart chart() const { return chart_; }
  bool is_infinity() const { return chart_ == Chart::Inverted && value_ == Complex(0.0, 0.0); }

  /// z in the finite chart; +inf components for the point at infinity.
  Complex finite() const;
  /// Unit-norm homogeneous coordinates (x, y) with point = x / y.
  std::pair<Complex, Complex> homogeneous() const;
  /// Same point expressed in the other chart. The origin of a chart has no
  /// representative in the other one and is returned unchanged.
  SpherePoint rechart() const;
  SpherePoint canonical() const;
  /// Point on the unit sphere of R^3 under stereographic projection.
  std::array<double, 3> unit_vector() const;
  SpherePoint antipode() const;

 private:
  Complex value_{0.0, 0.0};
  Chart chart_ = Chart::Finite;
};

/// 2|p - q| / sqrt((1 + |p|^2)(1 + |q|^2)), extended to infinity.
double chordal_distance(const SpherePoint& p, const SpherePoint& q);
double chordal_distance(Complex p, Complex q);

/// Largest pairwise chordal distance of a finite sample; 0 for fewer than 2 points.
double set_diameter(const std::vector<SpherePoint>& pts);

/// Minimal chordal distance between two samples.
double set_distance(const std::vector<SpherePoint>& a, const std::vector<SpherePoint>& b);

/// Chordal ball B(c, r) in the plane chart centred at c is |zeta| < this.
double chordal_radius_to_plane(double r);
double plane_radius_to_chordal(double rho);

/**
 * Affine chart of the sphere obtained by the rotation sending @p center to 0
 * and its antipode to infinity. Chordal balls about the center become round
 * disks about the origin.
 */
class PlanarChart {
 public:
  PlanarChart() = default;
  explicit PlanarChart(const SpherePoint& center);

  const SpherePoint& center() const { return center_; }
  Complex to_plane(const SpherePoint& p) const;
  SpherePoint to_sphere(Complex zeta) const;
  /// Homogeneous image of zeta, unnormalised.
  std::pair<Complex, Complex> to_homogeneous(Complex zeta) const;

 private:
  SpherePoint center_ = SpherePoint::from_complex(0.0);
  Complex p1_{0.0, 0.0}, p2_{1.0, 0.0};
};

}  // namespace bctk
