#include "bctk/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace bctk {

double signed_area(const std::vector<Complex>& poly) {
  double a = 0.0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Complex p = poly[i], q = poly[(i + 1) % n];
    a += p.real() * q.imag() - q.real() * p.imag();
  }
  return 0.5 * a;
}

bool point_in_polygon(const std::vector<Complex>& poly, Complex z) {
  bool inside = false;
  const std::size_t n = poly.size();
  const double x = z.real(), y = z.imag();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const double xi = poly[i].real(), yi = poly[i].imag();
    const double xj = poly[j].real(), yj = poly[j].imag();
    if ((yi > y) != (yj > y)) {
      const double xc = xj + (y - yj) * (xi - xj) / (yi - yj);
      if (x < xc) inside = !inside;
    }
  }
  return inside;
}

Box bounding_box(const std::vector<Complex>& poly) {
  Box b{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
        std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& z : poly) {
    b.xmin = std::min(b.xmin, z.real());
    b.xmax = std::max(b.xmax, z.real());
    b.ymin = std::min(b.ymin, z.imag());
    b.ymax = std::max(b.ymax, z.imag());
  }
  return b;
}

double point_segment_distance(Complex p, Complex a, Complex b) {
  const Complex ab = b - a;
  const double len2 = std::norm(ab);
  if (len2 == 0.0) return std::abs(p - a);
  const double t = std::clamp(((p - a) * std::conj(ab)).real() / len2, 0.0, 1.0);
  return std::abs(p - (a + t * ab));
}

namespace {

std::vector<Complex> to_plane(const PlanarChart& chart, const std::vector<SpherePoint>& pts) {
  std::vector<Complex> out;
  out.reserve(pts.size());
  for (const auto& p : pts) out.push_back(chart.to_plane(p));
  return out;
}

double cross(Complex a, Complex b) { return a.real() * b.imag() - a.imag() * b.real(); }

bool segments_cross(Complex a, Complex b, Complex c, Complex d) {
  const double d1 = cross(b - a, c - a), d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c), d4 = cross(d - c, b - c);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0;
}

bool boxes_overlap(const Box& a, const Box& b) {
  return a.xmin <= b.xmax && b.xmin <= a.xmax && a.ymin <= b.ymax && b.ymin <= a.ymax;
}

bool polygons_cross(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  const std::size_t n = a.size(), m = b.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Complex p = a[i], q = a[(i + 1) % n];
    const double xmin = std::min(p.real(), q.real()), xmax = std::max(p.real(), q.real());
    const double ymin = std::min(p.imag(), q.imag()), ymax = std::max(p.imag(), q.imag());
    for (std::size_t j = 0; j < m; ++j) {
      const Complex r = b[j], s = b[(j + 1) % m];
      if (std::max(r.real(), s.real()) < xmin || std::min(r.real(), s.real()) > xmax) continue;
      if (std::max(r.imag(), s.imag()) < ymin || std::min(r.imag(), s.imag()) > ymax) continue;
      if (segments_cross(p, q, r, s)) return true;
    }
  }
  return false;
}

}  // namespace

Domain::Domain(const SpherePoint& witness, std::vector<SpherePoint> outer,
               std::vector<std::vector<SpherePoint>> holes)
    : Domain(witness, witness, std::move(outer), std::move(holes)) {}

Domain::Domain(const SpherePoint& witness, const SpherePoint& chart_center, std::vector<SpherePoint> outer,
               std::vector<std::vector<SpherePoint>> holes)
    : witness_(witness), chart_(chart_center), outer_(std::move(outer)), holes_(std::move(holes)) {
  outer_plane_ = to_plane(chart_, outer_);
  if (signed_area(outer_plane_) < 0.0) {
    std::reverse(outer_.begin(), outer_.end());
    std::reverse(outer_plane_.begin(), outer_plane_.end());
  }
  for (auto& h : holes_) {
    auto hp = to_plane(chart_, h);
    if (signed_area(hp) > 0.0) {
      std::reverse(h.begin(), h.end());
      std::reverse(hp.begin(), hp.end());
    }
    holes_plane_.push_back(std::move(hp));
  }
  box_ = bounding_box(outer_plane_);
  diameter_ = set_diameter(outer_);
  for (const auto& p : outer_) radius_ = std::max(radius_, chordal_distance(p, witness_));
}

Domain Domain::disk(const SpherePoint& center, double radius, int samples) {
  if (!(radius > 0.0) || samples < 3) throw PreconditionError("disk needs radius > 0 and >= 3 samples");
  PlanarChart chart(center);
  const double rho = chordal_radius_to_plane(radius);
  std::vector<SpherePoint> pts;
  pts.reserve(samples);
  for (int k = 0; k < samples; ++k)
    pts.push_back(chart.to_sphere(std::polar(rho, 2.0 * std::numbers::pi * k / samples)));
  Domain d(center, std::move(pts));
  d.circle_ = rho;
  return d;
}

bool Domain::contains_plane(Complex zeta) const {
  if (!std::isfinite(zeta.real()) || !std::isfinite(zeta.imag())) return false;
  if (!box_.contains(zeta)) return false;
  if (!point_in_polygon(outer_plane_, zeta)) return false;
  for (const auto& h : holes_plane_)
    if (point_in_polygon(h, zeta)) return false;
  return true;
}

bool Domain::contains(const SpherePoint& p) const { return contains_plane(chart_.to_plane(p)); }

double Domain::distance_to(const SpherePoint& p) const {
  if (contains(p)) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& q : outer_) best = std::min(best, chordal_distance(p, q));
  for (const auto& h : holes_)
    for (const auto& q : h) best = std::min(best, chordal_distance(p, q));
  return best;
}

std::vector<SpherePoint> decimate(const std::vector<SpherePoint>& pts, std::size_t max_points) {
  if (pts.size() <= max_points || max_points == 0) return pts;
  const std::size_t step = (pts.size() + max_points - 1) / max_points;
  std::vector<SpherePoint> out;
  for (std::size_t i = 0; i < pts.size(); i += step) out.push_back(pts[i]);
  return out;
}

Domain Domain::decimated(std::size_t max_points) const {
  if (outer_.size() <= max_points) return *this;
  std::vector<std::vector<SpherePoint>> holes;
  for (const auto& h : holes_) holes.push_back(decimate(h, max_points));
  Domain d(witness_, chart_.center(), decimate(outer_, max_points), std::move(holes));
  return d;
}

Domain Domain::rewitnessed(const SpherePoint& witness) const {
  if (!contains(witness)) throw PreconditionError("new witness must lie inside the domain");
  Domain d(witness, chart_.center(), outer_, holes_);
  return d;
}

RelationReport relate(const Domain& a, const Domain& b) {
  RelationReport rep;
  const double lower = chordal_distance(a.witness(), b.witness()) - a.radius() - b.radius();
  if (lower > 0.05) {
    rep.relation = Relation::Disjoint;
    rep.margin = lower;
    return rep;
  }
  // Work in b's chart.
  const auto ap = to_plane(b.chart(), a.outer());
  const auto& bp = b.outer_plane();
  std::size_t a_in_b = 0, b_in_a = 0;
  for (const auto& z : ap)
    if (b.contains_plane(z)) ++a_in_b;
  for (const auto& p : b.outer())
    if (a.contains(p)) ++b_in_a;
  const bool crossing = boxes_overlap(bounding_box(ap), b.box()) && polygons_cross(ap, bp);
  rep.margin = set_distance(a.outer(), b.outer());
  if (!crossing && a_in_b == ap.size() && b_in_a == 0) rep.relation = Relation::Inside;
  else if (!crossing && b_in_a == bp.size() && a_in_b == 0) rep.relation = Relation::Contains;
  else if (!crossing && a_in_b == 0 && b_in_a == 0) rep.relation = Relation::Disjoint;
  else rep.relation = Relation::Overlap;
  return rep;
}

}  // namespace bctk
