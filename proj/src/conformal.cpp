#include "bctk/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/geometry.hpp>
#include <boost/geometry/geometries/linestring.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/ring.hpp>

#include "bctk/domain.hpp"
#include "bctk/pullback.hpp"

namespace bctk {

namespace {

namespace bg = boost::geometry;
using BPoint = bg::model::d2::point_xy<double>;
using BLine = bg::model::linestring<BPoint>;
using BRing = bg::model::ring<BPoint>;

BLine closed_line(const std::vector<Complex>& poly) {
  BLine l;
  for (const auto& z : poly) l.push_back({z.real(), z.imag()});
  l.push_back(l.front());
  return l;
}

bool simple(const std::vector<Complex>& poly) {
  BRing r;
  for (const auto& z : poly) r.push_back({z.real(), z.imag()});
  r.push_back(r.front());
  return !bg::intersects(r);
}

double polyline_distance(const std::vector<Complex>& poly, Complex p) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < poly.size(); ++i)
    best = std::min(best, point_segment_distance(p, poly[i], poly[(i + 1) % poly.size()]));
  return best;
}

double max_vertex_distance(const std::vector<Complex>& poly, Complex p) {
  double best = 0.0;
  for (const auto& z : poly) best = std::max(best, std::abs(z - p));
  return best;
}

int winding_number(const std::vector<Complex>& poly, Complex p) {
  int w = 0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Complex a = poly[i] - p, b = poly[(i + 1) % poly.size()] - p;
    const double cross = a.real() * b.imag() - a.imag() * b.real();
    if (a.imag() <= 0.0) {
      if (b.imag() > 0.0 && cross > 0.0) ++w;
    } else if (b.imag() <= 0.0 && cross < 0.0) {
      --w;
    }
  }
  return w;
}

/// In the closed region bounded by @p poly, up to @p tol.
bool closed_inside(const std::vector<Complex>& poly, Complex p, double tol) {
  return winding_number(poly, p) != 0 || polyline_distance(poly, p) <= tol;
}

bool strictly_inside(const std::vector<Complex>& poly, Complex p, double tol) {
  return winding_number(poly, p) != 0 && polyline_distance(poly, p) > tol;
}

/// Sorted abscissae where the horizontal line at height y meets the edges
/// (half-open rule, as in the even-odd test).
std::vector<double> crossings(const std::vector<Complex>& poly, double y, bool vertical) {
  std::vector<double> xs;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    Complex a = poly[i], b = poly[(i + 1) % poly.size()];
    if (vertical) {
      a = {a.imag(), a.real()};
      b = {b.imag(), b.real()};
    }
    if ((a.imag() <= y) != (b.imag() <= y))
      xs.push_back(a.real() + (y - a.imag()) * (b.real() - a.real()) / (b.imag() - a.imag()));
  }
  std::sort(xs.begin(), xs.end());
  return xs;
}

bool odd_below(const std::vector<double>& xs, double x) {
  return (std::lower_bound(xs.begin(), xs.end(), x) - xs.begin()) % 2 == 1;
}

/// Fraction of the way from x0 to x1 at which the nearest crossing lies.
double cut_fraction(const std::vector<double>& xs, double x0, double x1) {
  const double lo = std::min(x0, x1), hi = std::max(x0, x1);
  auto it = std::lower_bound(xs.begin(), xs.end(), lo);
  double best = 1.0;
  for (; it != xs.end() && *it <= hi; ++it) best = std::min(best, std::abs(*it - x0) / (hi - lo));
  return std::max(best, 1e-6);
}

}  // namespace

void AnnulusRegion::validate() const {
  if (outer.size() < 3 || inner.size() < 3) throw PreconditionError("annulus polylines need >= 3 vertices");
  for (const auto* poly : {&outer, &inner})
    for (const auto& z : *poly)
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw PreconditionError("annulus vertices must be finite");
  const BLine o = closed_line(outer), i = closed_line(inner);
  if (!simple(outer)) throw PreconditionError("outer polyline is not simple");
  if (!simple(inner)) throw PreconditionError("inner polyline is not simple");
  if (bg::intersects(o, i)) throw PreconditionError("inner and outer polylines meet");
  if (winding_number(outer, inner.front()) == 0) throw PreconditionError("inner polyline is not inside outer");
}

AnnulusRegion AnnulusRegion::round(Complex center, double r, double R, int samples) {
  if (!(r > 0.0 && r < R)) throw PreconditionError("round annulus needs 0 < r < R");
  if (samples < 8) throw PreconditionError("round annulus needs >= 8 samples");
  AnnulusRegion A;
  A.chart = PlanarChart(SpherePoint::from_complex(center));
  for (int k = 0; k < samples; ++k) {
    const Complex u = std::polar(1.0, 2.0 * std::numbers::pi * k / samples);
    A.outer.push_back(center + R * u);
    A.inner.push_back(center + r * u);
  }
  return A;
}

double modulus_round(double r, double R) {
  if (!(r > 0.0) || !(R > r)) throw PreconditionError("modulus_round needs 0 < r < R");
  return std::log(R / r);
}

ModulusEstimate modulus_estimate(const AnnulusRegion& A, const ModulusOptions& opt) {
  A.validate();
  if (opt.grid < 64) throw PreconditionError("grid must be >= 64");
  const int N = opt.grid;
  const Box box = bounding_box(A.outer);
  const double side = std::max(box.xmax - box.xmin, box.ymax - box.ymin);
  const double h = side / (N - 5);
  const double x0 = 0.5 * (box.xmin + box.xmax) - 0.5 * (N - 1) * h;
  const double y0 = 0.5 * (box.ymin + box.ymax) - 0.5 * (N - 1) * h;
  auto X = [&](int i) { return x0 + i * h; };
  auto Y = [&](int j) { return y0 + j * h; };

  struct Lines {
    std::vector<double> outer, inner;
  };
  std::vector<Lines> rows(N), cols(N);
  for (int k = 0; k < N; ++k) {
    rows[k] = {crossings(A.outer, Y(k), false), crossings(A.inner, Y(k), false)};
    cols[k] = {crossings(A.outer, X(k), true), crossings(A.inner, X(k), true)};
  }
  // Labels: 0 inside the inner curve, 1 outside the outer one, 2 in A.
  std::vector<signed char> label(static_cast<std::size_t>(N) * N);
  auto at = [N](int i, int j) { return static_cast<std::size_t>(j) * N + i; };
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i) {
      const double x = X(i);
      label[at(i, j)] = !odd_below(rows[j].outer, x) ? 1 : odd_below(rows[j].inner, x) ? 0 : 2;
    }

  // Network: per node in A, up to four neighbours in A and a boundary term.
  struct Node {
    std::size_t id;
    int nb[4];
    double diag = 0.0, rhs = 0.0;
  };
  std::vector<int> index(label.size(), -1);
  std::vector<Node> nodes;
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i)
      if (label[at(i, j)] == 2) {
        index[at(i, j)] = static_cast<int>(nodes.size());
        nodes.push_back({at(i, j), {-1, -1, -1, -1}});
      }
  if (nodes.empty()) throw NumericError("numeric-failure", "grid does not resolve the annulus");
  const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
  struct Cut {
    int node;
    double c, g;
  };
  std::vector<Cut> cuts;
  for (int n = 0; n < static_cast<int>(nodes.size()); ++n) {
    const int i = static_cast<int>(nodes[n].id % N), j = static_cast<int>(nodes[n].id / N);
    for (int k = 0; k < 4; ++k) {
      const int a = i + di[k], b = j + dj[k];
      if (a < 0 || b < 0 || a >= N || b >= N) throw NumericError("numeric-failure", "annulus touches the grid edge");
      const signed char l = label[at(a, b)];
      if (l == 2) {
        nodes[n].nb[k] = index[at(a, b)];
        nodes[n].diag += 1.0;
        continue;
      }
      const bool horizontal = k < 2;
      const Lines& line = horizontal ? rows[j] : cols[i];
      const auto& xs = l == 0 ? line.inner : line.outer;
      const double theta = horizontal ? cut_fraction(xs, X(i), X(a)) : cut_fraction(xs, Y(j), Y(b));
      const double c = 1.0 / theta, g = l;
      nodes[n].diag += c;
      nodes[n].rhs += c * g;
      cuts.push_back({n, c, g});
    }
  }
  for (int j = 0; j + 1 < N; ++j)
    for (int i = 0; i + 1 < N; ++i) {
      const int a = label[at(i, j)];
      if (a != 2 && (label[at(i + 1, j)] == 1 - a || label[at(i, j + 1)] == 1 - a))
        throw NumericError("numeric-failure", "grid does not resolve the annulus");
    }

  std::vector<double> u(nodes.size(), 0.5);
  const double omega = 2.0 / (1.0 + std::sin(std::numbers::pi / N));
  ModulusEstimate out;
  out.spacing = h;
  bool converged = false;
  for (int sweep = 1; sweep <= opt.max_sweeps; ++sweep) {
    double change = 0.0;
    for (std::size_t n = 0; n < nodes.size(); ++n) {
      const Node& nd = nodes[n];
      double s = nd.rhs;
      for (int k = 0; k < 4; ++k)
        if (nd.nb[k] >= 0) s += u[nd.nb[k]];
      const double delta = omega * (s / nd.diag - u[n]);
      u[n] += delta;
      change = std::max(change, std::abs(delta));
    }
    out.sweeps = sweep;
    if (change < opt.tolerance) {
      converged = true;
      break;
    }
  }
  if (!converged) throw NumericError("numeric-failure", "SOR did not converge");

  double E = 0.0;
  for (std::size_t n = 0; n < nodes.size(); ++n)
    for (int k : {0, 2})
      if (nodes[n].nb[k] >= 0) E += std::pow(u[n] - u[nodes[n].nb[k]], 2);
  for (const auto& c : cuts) E += c.c * std::pow(u[c.node] - c.g, 2);
  out.energy = E;
  out.raw = 2.0 * std::numbers::pi / E;

  // Round annuli about centres inside the inner curve, padded by one cell.
  std::vector<Complex> centres;
  {
    Complex sum = 0.0;
    for (const auto& z : A.inner) sum += z;
    centres.push_back(sum / static_cast<double>(A.inner.size()));
    std::vector<Complex> holes;
    for (int j = 0; j < N; ++j)
      for (int i = 0; i < N; ++i)
        if (label[at(i, j)] == 0) holes.push_back({X(i), Y(j)});
    const std::size_t stride = std::max<std::size_t>(1, holes.size() / 1024);
    for (std::size_t k = 0; k < holes.size(); k += stride) centres.push_back(holes[k]);
  }
  double lower = 0.0, upper = std::numeric_limits<double>::infinity();
  for (const auto& p : centres) {
    if (winding_number(A.inner, p) == 0) continue;
    const double r_in = max_vertex_distance(A.inner, p), R_in = polyline_distance(A.outer, p);
    const double rho_in = polyline_distance(A.inner, p), rho_out = max_vertex_distance(A.outer, p);
    if (R_in - h > r_in + h) lower = std::max(lower, std::log((R_in - h) / (r_in + h)));
    upper = std::min(upper, std::log((rho_out + h) / std::max(rho_in - h, 0.5 * rho_in)));
  }
  out.lower = lower;
  out.upper = upper;
  out.estimate = std::clamp(out.raw, lower, upper);
  out.clamped = out.estimate != out.raw;
  return out;
}

GrotzschReport grotzsch_check(const AnnulusRegion& A, const std::vector<AnnulusRegion>& subannuli,
                              const ModulusOptions& opt) {
  A.validate();
  const Box box = bounding_box(A.outer);
  const double tol = 1e-9 * std::max(box.xmax - box.xmin, box.ymax - box.ymin);
  for (std::size_t s = 0; s < subannuli.size(); ++s) {
    const AnnulusRegion& B = subannuli[s];
    B.validate();
    for (const auto& z : B.outer)
      if (!closed_inside(A.outer, z, tol)) throw PreconditionError("sub-annulus leaves the outer boundary");
    for (const auto& z : B.inner)
      if (strictly_inside(A.inner, z, tol)) throw PreconditionError("sub-annulus enters the inner disk");
    for (const auto& z : A.inner)
      if (!closed_inside(B.inner, z, tol)) throw PreconditionError("sub-annulus is not essential");
    for (std::size_t t = 0; t < s; ++t) {
      const AnnulusRegion& C = subannuli[t];
      auto all_in = [tol](const std::vector<Complex>& pts, const std::vector<Complex>& poly) {
        return std::all_of(pts.begin(), pts.end(), [&](Complex z) { return closed_inside(poly, z, tol); });
      };
      if (!all_in(B.outer, C.inner) && !all_in(C.outer, B.inner))
        throw PreconditionError("sub-annuli overlap");
    }
  }
  GrotzschReport rep;
  const ModulusEstimate mA = modulus_estimate(A, opt);
  rep.modulus = mA.estimate;
  rep.tolerance = mA.width();
  double sum = 0.0;
  for (const auto& B : subannuli) {
    const ModulusEstimate m = modulus_estimate(B, opt);
    rep.sub_moduli.push_back(m.estimate);
    rep.tolerance += m.width();
    sum += m.estimate;
  }
  rep.residual = rep.modulus - sum;
  rep.verdict = rep.residual >= -rep.tolerance ? Verdict::Holds : Verdict::Fails;
  return rep;
}

KoebeSample pullback_koebe_sample(const RationalMap& R, int n, Complex z0, double r, Complex xi) {
  if (n < 1) throw PreconditionError("iterate count must be >= 1");
  if (!(r > 0.0)) throw PreconditionError("radius must be positive");
  auto iterate = [R, n](Complex z, Complex* deriv) {
    Complex d(1.0, 0.0);
    for (int k = 0; k < n; ++k) {
      d *= R.planar_derivative(z);
      z = R(z);
    }
    if (deriv) *deriv = d;
    return z;
  };
  const auto orb = orbit(R, SpherePoint::from_complex(xi), n);
  if (chordal_distance(orb.back(), SpherePoint::from_complex(z0)) > 1e-9)
    throw PreconditionError("R^n(xi) must equal z0");

  // Chordal ball around the planar disk, pulled back step by step.
  const SpherePoint c0 = SpherePoint::from_complex(z0);
  double rc = 0.0;
  for (int k = 0; k < 64; ++k)
    rc = std::max(rc, chordal_distance(c0, SpherePoint::from_complex(z0 + std::polar(r, 2.0 * std::numbers::pi * k / 64))));
  rc *= 1.01;
  if (!(rc < 1.0)) throw PreconditionError("disk too large");
  Domain source = Domain::disk(c0, rc, 128);
  for (int k = n - 1; k >= 0; --k) {
    const auto comps = pullback_components(R, source);
    const PullbackComponent* hit = nullptr;
    for (const auto& c : comps)
      if (c.domain.contains(orb[k])) hit = &c;
    if (!hit) throw NumericError("numeric-failure", "orbit point not found in a pull-back");
    if (!hit->univalent()) throw PreconditionError("pull-back is not univalent");
    source = hit->domain;
  }

  KoebeSample s;
  s.z0 = z0;
  s.r = r;
  s.phi = [iterate, z0, xi](Complex w) {
    Complex p = xi;
    constexpr int steps = 16;
    for (int k = 1; k <= steps; ++k) {
      const Complex t = z0 + (w - z0) * (static_cast<double>(k) / steps);
      for (int it = 0; it < 40; ++it) {
        Complex d;
        const Complex f = iterate(p, &d) - t;
        const Complex step = f / d;
        p -= step;
        if (std::abs(step) <= 1e-15 * (1.0 + std::abs(p))) break;
      }
    }
    return p;
  };
  s.dphi = [iterate, phi = s.phi](Complex w) {
    Complex d;
    iterate(phi(w), &d);
    return 1.0 / d;
  };
  return s;
}

KoebeReport koebe_calibration(const std::vector<KoebeSample>& samples, double epsilon, int radial, int angular) {
  if (!(epsilon > 0.0 && epsilon <= 0.5)) throw PreconditionError("epsilon must lie in (0, 1/2]");
  if (radial < 1 || angular < 4) throw PreconditionError("mesh too coarse");
  if (samples.empty()) throw PreconditionError("no samples");
  auto distortion = [radial, angular](const KoebeSample& s, double eps) {
    double hi = std::abs(s.dphi(s.z0)), lo = hi;
    for (int a = 1; a <= radial; ++a)
      for (int b = 0; b < angular; ++b) {
        const double m = std::abs(
            s.dphi(s.z0 + std::polar(eps * s.r * a / radial, 2.0 * std::numbers::pi * b / angular)));
        hi = std::max(hi, m);
        lo = std::min(lo, m);
      }
    return hi / lo;
  };
  KoebeReport rep;
  rep.epsilon = epsilon;
  rep.bound = std::pow((1.0 + epsilon) / (1.0 - epsilon), 4);
  for (const auto& s : samples) {
    if (!(s.r > 0.0) || !s.phi || !s.dphi) throw PreconditionError("malformed sample");
    // An analytic map injective on the boundary circle is univalent inside.
    std::vector<Complex> image;
    std::vector<SpherePoint> rim{SpherePoint::infinity()};
    for (int k = 0; k < 256; ++k) {
      const Complex z = s.phi(s.z0 + std::polar(s.r, 2.0 * std::numbers::pi * k / 256));
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw PreconditionError("sample image is unbounded");
      image.push_back(z);
      rim.push_back(SpherePoint::from_complex(z));
    }
    if (!simple(image)) throw PreconditionError("sample is not univalent");
    // Points outside the rim lie in the complement of the image.
    const Complex c = s.phi(s.z0);
    std::vector<Complex> probes{0.0, 1.0, -1.0, {0.0, 1.0}, {0.0, -1.0}};
    if (c != 0.0) probes.push_back(-1.0 / std::conj(c));
    for (const auto& z : probes)
      if (!point_in_polygon(image, z)) rim.push_back(SpherePoint::from_complex(z));
    KoebeRow row;
    row.guard_diameter = set_diameter(rim);
    if (!(row.guard_diameter > 1.0)) throw PreconditionError("image complement too small");
    row.distortion = distortion(s, epsilon);
    rep.distortion = std::max(rep.distortion, row.distortion);
    rep.distortion_half = std::max(rep.distortion_half, distortion(s, 0.5 * epsilon));
    rep.samples.push_back(row);
  }
  rep.slope = (rep.distortion - 1.0) / epsilon;
  rep.slope_half = (rep.distortion_half - 1.0) / (0.5 * epsilon);
  rep.within_bound = rep.distortion <= rep.bound * (1.0 + 1e-12);
  rep.trend = rep.distortion_half - 1.0 <= 0.5 * (rep.distortion - 1.0) * (1.0 + epsilon) + 1e-12;
  return rep;
}

ModulusBounds qc_modulus_bounds(double K, double area_N, double modA) {
  if (!(K >= 1.0)) throw PreconditionError("K must be >= 1");
  if (!(area_N >= 0.0)) throw PreconditionError("area must be >= 0");
  if (!(modA > 0.0)) throw PreconditionError("modulus must be positive");
  const double t = (K - 1.0) * area_N / (2.0 * std::numbers::pi);
  return {modA / (1.0 + t / modA), modA + t};
}

}  // namespace bctk
