#include "bctk/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bctk {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Holds: return "holds";
    case Verdict::Fails: return "fails";
    case Verdict::Undetermined: return "undetermined";
  }
  return "undetermined";
}

SpherePoint SpherePoint::from_complex(Complex z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return infinity();
  if (std::abs(z) <= 1.0) return {z, Chart::Finite};
  return {1.0 / z, Chart::Inverted};
}

SpherePoint SpherePoint::from_homogeneous(Complex x, Complex y) {
  const double ax = std::abs(x), ay = std::abs(y);
  if (ax == 0.0 && ay == 0.0) throw NumericError("degenerate", "homogeneous point (0 : 0)");
  if (ax <= ay) return {x / y, Chart::Finite};
  return {y / x, Chart::Inverted};
}

Complex SpherePoint::finite() const {
  if (chart_ == Chart::Finite) return value_;
  if (value_ == Complex(0.0, 0.0)) {
    const double inf = std::numeric_limits<double>::infinity();
    return {inf, inf};
  }
  return 1.0 / value_;
}

std::pair<Complex, Complex> SpherePoint::homogeneous() const {
  const double n = std::sqrt(1.0 + std::norm(value_));
  if (chart_ == Chart::Finite) return {value_ / n, Complex(1.0 / n, 0.0)};
  return {Complex(1.0 / n, 0.0), value_ / n};
}

SpherePoint SpherePoint::rechart() const {
  if (value_ == Complex(0.0, 0.0)) return *this;
  return {1.0 / value_, chart_ == Chart::Finite ? Chart::Inverted : Chart::Finite};
}

SpherePoint SpherePoint::canonical() const {
  if (std::abs(value_) <= 1.0) return *this;
  return rechart();
}

std::array<double, 3> SpherePoint::unit_vector() const {
  auto [x, y] = homogeneous();
  const Complex xy = x * std::conj(y);
  return {2.0 * xy.real(), 2.0 * xy.imag(), std::norm(x) - std::norm(y)};
}

SpherePoint SpherePoint::antipode() const {
  auto [x, y] = homogeneous();
  return from_homogeneous(-std::conj(y), std::conj(x));
}

double chordal_distance(const SpherePoint& p, const SpherePoint& q) {
  auto [x1, y1] = p.homogeneous();
  auto [x2, y2] = q.homogeneous();
  return 2.0 * std::abs(x1 * y2 - x2 * y1);
}

double chordal_distance(Complex p, Complex q) {
  return chordal_distance(SpherePoint::from_complex(p), SpherePoint::from_complex(q));
}

double set_diameter(const std::vector<SpherePoint>& pts) {
  std::vector<std::array<double, 3>> u;
  u.reserve(pts.size());
  for (const auto& p : pts) u.push_back(p.unit_vector());
  double best = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    for (std::size_t j = i + 1; j < u.size(); ++j) {
      const double dx = u[i][0] - u[j][0], dy = u[i][1] - u[j][1], dz = u[i][2] - u[j][2];
      best = std::max(best, dx * dx + dy * dy + dz * dz);
    }
  }
  return std::sqrt(best);
}

double set_distance(const std::vector<SpherePoint>& a, const std::vector<SpherePoint>& b) {
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::array<double, 3>> ub;
  ub.reserve(b.size());
  for (const auto& q : b) ub.push_back(q.unit_vector());
  for (const auto& p : a) {
    const auto u = p.unit_vector();
    for (const auto& v : ub) {
      const double dx = u[0] - v[0], dy = u[1] - v[1], dz = u[2] - v[2];
      best = std::min(best, dx * dx + dy * dy + dz * dz);
    }
  }
  return std::sqrt(best);
}

double chordal_radius_to_plane(double r) {
  if (r <= 0.0) return 0.0;
  if (r >= 2.0) return std::numeric_limits<double>::infinity();
  return r / std::sqrt(4.0 - r * r);
}

double plane_radius_to_chordal(double rho) { return 2.0 * rho / std::sqrt(1.0 + rho * rho); }

PlanarChart::PlanarChart(const SpherePoint& center) : center_(center.canonical()) {
  std::tie(p1_, p2_) = center_.homogeneous();
}

std::pair<Complex, Complex> PlanarChart::to_homogeneous(Complex zeta) const {
  return {std::conj(p2_) * zeta + p1_, -std::conj(p1_) * zeta + p2_};
}

SpherePoint PlanarChart::to_sphere(Complex zeta) const {
  if (!std::isfinite(zeta.real()) || !std::isfinite(zeta.imag())) return center_.antipode();
  auto [x, y] = to_homogeneous(zeta);
  return SpherePoint::from_homogeneous(x, y);
}

Complex PlanarChart::to_plane(const SpherePoint& p) const {
  auto [w1, w2] = p.homogeneous();
  const Complex num = p2_ * w1 - p1_ * w2;
  const Complex den = std::conj(p1_) * w1 + std::conj(p2_) * w2;
  if (den == Complex(0.0, 0.0)) {
    const double inf = std::numeric_limits<double>::infinity();
    return {inf, inf};
  }
  return num / den;
}

}  // namespace bctk
