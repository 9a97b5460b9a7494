/**
 * @file domain.hpp
 * @brief Polygonal domains on the sphere.
 *
 * A Domain is a bounded region of a planar chart centred at an interior
 * witness point: one outer boundary (counter-clockwise) and optional holes
 * (clockwise). Boundary vertices are kept as sphere points so that exact
 * preimage vertices survive chart changes.
 */
#pragma once

#include <optional>
#include <vector>

#include "bctk/sphere.hpp"

namespace bctk {

struct Box {
  double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
  bool contains(Complex z) const { return z.real() >= xmin && z.real() <= xmax && z.imag() >= ymin && z.imag() <= ymax; }
};

/// Signed area (shoelace); positive for counter-clockwise.
double signed_area(const std::vector<Complex>& poly);
/// Even-odd point-in-polygon test.
bool point_in_polygon(const std::vector<Complex>& poly, Complex z);
Box bounding_box(const std::vector<Complex>& poly);
double point_segment_distance(Complex p, Complex a, Complex b);

class Domain {
 public:
  Domain() = default;
  Domain(const SpherePoint& witness, std::vector<SpherePoint> outer,
         std::vector<std::vector<SpherePoint>> holes = {});
  /// Chart centred at @p chart_center instead of the witness; its antipode
  /// must lie outside the domain.
  Domain(const SpherePoint& witness, const SpherePoint& chart_center, std::vector<SpherePoint> outer,
         std::vector<std::vector<SpherePoint>> holes = {});

  /// Chordal ball B(center, radius) sampled at @p samples boundary points.
  static Domain disk(const SpherePoint& center, double radius, int samples);

  const PlanarChart& chart() const { return chart_; }
  const SpherePoint& witness() const { return witness_; }
  const std::vector<SpherePoint>& outer() const { return outer_; }
  const std::vector<std::vector<SpherePoint>>& holes() const { return holes_; }
  const std::vector<Complex>& outer_plane() const { return outer_plane_; }
  const std::vector<std::vector<Complex>>& holes_plane() const { return holes_plane_; }
  const Box& box() const { return box_; }

  /// Exact circle |zeta| = radius in the chart (vertices evenly spaced).
  std::optional<double> circle_radius() const { return circle_; }

  bool contains(const SpherePoint& p) const;
  bool contains_plane(Complex zeta) const;
  /// Largest chordal distance between outer boundary vertices.
  double diameter() const { return diameter_; }
  /// Largest chordal distance from the witness to the outer boundary.
  double radius() const { return radius_; }
  /// 0 inside, else minimal chordal distance to boundary vertices.
  double distance_to(const SpherePoint& p) const;
  /// Copy with at most @p max_points outer vertices (keeps a subset).
  Domain decimated(std::size_t max_points) const;
  /// Same point set with another interior witness (chart unchanged).
  Domain rewitnessed(const SpherePoint& witness) const;

 private:
  SpherePoint witness_;
  PlanarChart chart_;
  std::vector<SpherePoint> outer_;
  std::vector<std::vector<SpherePoint>> holes_;
  std::vector<Complex> outer_plane_;
  std::vector<std::vector<Complex>> holes_plane_;
  Box box_;
  std::optional<double> circle_;
  double diameter_ = 0.0;
  double radius_ = 0.0;
};

/// Subsample indices 0, k, 2k, ... so that at most max_points remain.
std::vector<SpherePoint> decimate(const std::vector<SpherePoint>& pts, std::size_t max_points);

enum class Relation { Disjoint, Inside, Contains, Overlap };

struct RelationReport {
  Relation relation = Relation::Disjoint;
  /// Minimal chordal distance between the two boundaries (vertex sample).
  double margin = 0.0;
};

/// How closure(a) sits relative to closure(b).
RelationReport relate(const Domain& a, const Domain& b);

}  // namespace bctk
