#include "bctk/rational_map.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace bctk {

const char* to_string(JuliaStatus s) {
  switch (s) {
    case JuliaStatus::Yes: return "yes";
    case JuliaStatus::No: return "no";
    case JuliaStatus::Undetermined: return "undetermined";
  }
  return "undetermined";
}

namespace {

Poly padded(const Poly& p, int n) {
  std::vector<Complex> c = p.c;
  c.resize(n + 1, Complex(0.0, 0.0));
  return Poly(std::move(c));
}

/// Coefficients in zeta of sum_k p_k x^k y^(n-k) with (x, y) the chart's
/// homogeneous image of zeta.
Poly pulled(const Poly& p, int n, const PlanarChart& chart) {
  auto [x0, y0] = chart.to_homogeneous(0.0);
  auto [x1, y1] = chart.to_homogeneous(1.0);
  const Poly X({x0, x1 - x0});
  const Poly Y({y0, y1 - y0});
  std::vector<Poly> xp{Poly({1.0})}, yp{Poly({1.0})};
  for (int k = 1; k <= n; ++k) {
    xp.push_back(xp.back() * X);
    yp.push_back(yp.back() * Y);
  }
  Poly acc({0.0});
  for (int k = 0; k <= n && k < static_cast<int>(p.c.size()); ++k)
    if (p.c[k] != Complex(0.0, 0.0)) acc = acc + p.c[k] * (xp[k] * yp[n - k]);
  return acc;
}

const std::vector<SpherePoint>& generic_centers() {
  static const std::vector<SpherePoint> c = {
      SpherePoint::from_complex({0.3137, 0.1211}), SpherePoint::from_complex({-0.2719, 0.3383}),
      SpherePoint::from_complex({0.1471, -0.4127}), SpherePoint::from_complex({-0.6211, -0.2243}),
      SpherePoint::from_complex({0.5519, 0.4729}),  SpherePoint::from_complex({-0.0813, 0.7117})};
  return c;
}

SpherePoint snap(const SpherePoint& p) {
  if (chordal_distance(p, SpherePoint::from_complex(0.0)) < 1e-12) return SpherePoint::from_complex(0.0);
  if (chordal_distance(p, SpherePoint::infinity()) < 1e-12) return SpherePoint::infinity();
  Complex v = p.value();
  const double s = std::abs(v);
  if (std::abs(v.imag()) < 1e-14 * std::max(s, 1e-300)) v = {v.real(), 0.0};
  if (std::abs(v.real()) < 1e-14 * std::max(s, 1e-300)) v = {0.0, v.imag()};
  return SpherePoint(v, p.chart());
}

double lead_ratio(const Poly& p, int n) {
  double m = 0.0;
  for (auto& x : p.c) m = std::max(m, std::abs(x));
  if (m == 0.0 || static_cast<int>(p.c.size()) <= n) return 0.0;
  return std::abs(p.c[n]) / m;
}

Complex resultant(const Poly& a, const Poly& b) {
  const int m = a.degree(), n = b.degree();
  if (m <= 0 || n <= 0) {
    // Res(a, const) = const^deg a.
    if (n == 0) return std::pow(b.c[0], m);
    if (m == 0) return std::pow(a.c[0], n);
  }
  const int N = m + n;
  Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(N, N);
  for (int r = 0; r < n; ++r)
    for (int k = 0; k <= m; ++k) S(r, r + k) = a.c[m - k];
  for (int r = 0; r < m; ++r)
    for (int k = 0; k <= n; ++k) S(n + r, r + k) = b.c[n - k];
  return S.determinant();
}

}  // namespace

RationalMap RationalMap::from_coefficients(std::vector<Complex> numerator,
                                           std::vector<Complex> denominator,
                                           const ClassifyOptions& opt) {
  Poly P = Poly(std::move(numerator)).trimmed();
  Poly Q = Poly(std::move(denominator)).trimmed();
  if (P.degree() < 0 || Q.degree() < 0)
    throw PreconditionError("numerator and denominator must be nonzero polynomials");
  const int d = std::max(P.degree(), Q.degree());
  if (d < 2) throw PreconditionError("degree must be at least 2");
  const Complex lead = P.degree() >= Q.degree() ? P.c[P.degree()] : Q.c[Q.degree()];
  P = (1.0 / lead) * P;
  Q = (1.0 / lead) * Q;
  const double res = std::abs(resultant(P, Q));
  if (!(res > 1e-10)) {
    std::ostringstream os;
    os << "numerator and denominator share a root (|resultant| = " << res << ")";
    throw PreconditionError(os.str());
  }
  RationalMap R;
  R.degree_ = d;
  R.num_ = P;
  R.den_ = Q;
  R.num_rev_ = P.reversed(d);
  R.den_rev_ = Q.reversed(d);
  R.compute_critical_points();
  R.classify(opt);
  return R;
}

RationalMap RationalMap::quadratic(Complex c, const ClassifyOptions& opt) {
  return from_coefficients({c, 0.0, 1.0}, {1.0}, opt);
}

RationalMap RationalMap::reclassified(const ClassifyOptions& opt) const {
  RationalMap R = *this;
  R.classify(opt);
  return R;
}

Jet RationalMap::jet(const SpherePoint& z) const {
  const Chart ch = z.chart();
  const Complex a = z.value();
  Complex A, dA, B, dB;
  chart_numerator(ch).eval2(a, A, dA);
  chart_denominator(ch).eval2(a, B, dB);
  if (std::abs(A) <= std::abs(B)) {
    return {SpherePoint(A / B, Chart::Finite), (dA * B - A * dB) / (B * B)};
  }
  return {SpherePoint(B / A, Chart::Inverted), (dB * A - B * dA) / (A * A)};
}

SpherePoint RationalMap::operator()(const SpherePoint& z) const { return jet(z.canonical()).image; }

Complex RationalMap::operator()(Complex z) const { return (*this)(SpherePoint::from_complex(z)).finite(); }

double RationalMap::spherical_derivative(const SpherePoint& z) const {
  const SpherePoint c = z.canonical();
  const Jet j = jet(c);
  return std::abs(j.derivative) * (1.0 + std::norm(c.value())) / (1.0 + std::norm(j.image.value()));
}

Complex RationalMap::planar_derivative(Complex z) const {
  Complex P, dP, Q, dQ;
  num_.eval2(z, P, dP);
  den_.eval2(z, Q, dQ);
  return (dP * Q - P * dQ) / (Q * Q);
}

std::vector<SpherePoint> RationalMap::critical_values() const {
  std::vector<SpherePoint> out;
  for (const auto& c : crit_) out.push_back(c.image);
  return out;
}

std::vector<int> RationalMap::julia_blocks() const {
  std::vector<int> out;
  for (const auto& b : blocks_)
    if (b.in_julia) out.push_back(b.id);
  return out;
}

int RationalMap::max_julia_local_degree() const {
  int m = 2;
  for (const auto& b : blocks_)
    if (b.in_julia) m = std::max(m, b.multiplicity);
  return m;
}

void RationalMap::compute_critical_points() {
  const int d = degree_;
  const Poly Ph = padded(num_, d), Qh = padded(den_, d);
  Poly best_w;
  PlanarChart best_chart;
  double best_ratio = -1.0;
  for (const auto& center : generic_centers()) {
    PlanarChart chart(center);
    const Poly A = pulled(Ph, d, chart), B = pulled(Qh, d, chart);
    const Poly W = A.derivative() * B - A * B.derivative();
    const double r = lead_ratio(W, 2 * d - 2);
    if (r > best_ratio) {
      best_ratio = r;
      best_w = W;
      best_chart = chart;
    }
    if (r > 1e-6) break;
  }
  Poly W = best_w;
  W.c.resize(2 * d - 1);
  auto roots = clustered_roots(W);
  int total = 0;
  crit_.clear();
  for (const auto& r : roots) {
    CriticalDatum c;
    c.point = snap(best_chart.to_sphere(r.z));
    c.local_degree = r.multiplicity + 1;
    c.image = (*this)(c.point);
    crit_.push_back(c);
    total += r.multiplicity;
  }
  if (total != 2 * d - 2) {
    std::ostringstream os;
    os << "critical multiplicities sum to " << total << ", expected " << 2 * d - 2;
    throw NumericError("riemann-hurwitz", os.str());
  }
  std::sort(crit_.begin(), crit_.end(), [](const CriticalDatum& a, const CriticalDatum& b) {
    const bool ia = a.point.is_infinity(), ib = b.point.is_infinity();
    if (ia != ib) return ib;
    const Complex x = a.point.finite(), y = b.point.finite();
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
  });
}

std::vector<PreimagePoint> RationalMap::preimages(const SpherePoint& w) const {
  const int d = degree_;
  auto [w1, w2] = w.homogeneous();
  const Poly F = w2 * padded(num_, d) - w1 * padded(den_, d);
  Poly best;
  PlanarChart best_chart;
  double best_ratio = -1.0;
  for (const auto& center : generic_centers()) {
    PlanarChart chart(center);
    Poly G = pulled(F, d, chart);
    const double r = lead_ratio(G, d);
    if (r > best_ratio) {
      best_ratio = r;
      best = G;
      best_chart = chart;
    }
    if (r > 1e-3) break;
  }
  auto roots = clustered_roots(best);
  std::vector<PreimagePoint> out;
  int total = 0;
  for (const auto& r : roots) {
    SpherePoint z = best_chart.to_sphere(r.z);
    if (r.multiplicity == 1) {
      // Polish in the canonical chart of the root.
      const Poly& A = chart_numerator(z.chart());
      const Poly& B = chart_denominator(z.chart());
      Complex x = z.value();
      for (int it = 0; it < 4; ++it) {
        Complex a, da, b, db;
        A.eval2(x, a, da);
        B.eval2(x, b, db);
        const Complex g = w2 * a - w1 * b, dg = w2 * da - w1 * db;
        if (dg == Complex(0.0, 0.0)) break;
        const Complex step = g / dg;
        if (!std::isfinite(std::abs(step))) break;
        x -= step;
        if (std::abs(step) < 1e-16 * (1.0 + std::abs(x))) break;
      }
      z = SpherePoint(x, z.chart()).canonical();
    } else {
      z = snap(z);
    }
    out.push_back({z, r.multiplicity});
    total += r.multiplicity;
  }
  if (total != d) {
    std::ostringstream os;
    os << "preimage multiplicities sum to " << total << ", expected " << d;
    throw NumericError("preimage", os.str());
  }
  for (const auto& p : out) {
    const double err = chordal_distance((*this)(p.point), w);
    const double tol = p.multiplicity == 1 ? 1e-9 : 1e-7;
    if (err > tol) {
      std::ostringstream os;
      os << "preimage residual " << err << " exceeds " << tol;
      throw NumericError("preimage", os.str());
    }
  }
  std::sort(out.begin(), out.end(), [](const PreimagePoint& a, const PreimagePoint& b) {
    const bool ia = a.point.is_infinity(), ib = b.point.is_infinity();
    if (ia != ib) return ib;
    const Complex x = a.point.finite(), y = b.point.finite();
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
  });
  return out;
}

std::vector<SpherePoint> orbit(const RationalMap& R, const SpherePoint& z, int n) {
  std::vector<SpherePoint> out;
  out.reserve(n + 1);
  out.push_back(z.canonical());
  for (int k = 0; k < n; ++k) out.push_back(R(out.back()));
  return out;
}

std::pair<SpherePoint, Complex> refine_periodic_point(const RationalMap& R, const SpherePoint& start,
                                                      int period) {
  const SpherePoint s = start.canonical();
  const Chart ch = s.chart();
  Complex x = s.value();
  Complex D(1.0, 0.0);
  for (int it = 0; it < 60; ++it) {
    SpherePoint p(x, ch);
    D = Complex(1.0, 0.0);
    for (int k = 0; k < period; ++k) {
      const Jet j = R.jet(p);
      D *= j.derivative;
      p = j.image;
    }
    Complex y = p.value();
    if (p.chart() != ch) {
      if (y == Complex(0.0, 0.0)) throw NumericError("periodic-point", "orbit left the chart");
      D *= -1.0 / (y * y);
      y = 1.0 / y;
    }
    const Complex f = y - x, df = D - 1.0;
    if (df == Complex(0.0, 0.0)) break;
    const Complex step = f / df;
    x -= step;
    if (!std::isfinite(std::abs(x))) throw NumericError("periodic-point", "Newton diverged");
    if (std::abs(step) <= 1e-15 * (1.0 + std::abs(x))) {
      // One more pass for the multiplier at the converged point.
      SpherePoint q(x, ch);
      D = Complex(1.0, 0.0);
      for (int k = 0; k < period; ++k) {
        const Jet j = R.jet(q);
        D *= j.derivative;
        q = j.image;
      }
      if (q.chart() != ch && q.value() != Complex(0.0, 0.0)) D *= -1.0 / (q.value() * q.value());
      return {SpherePoint(x, ch).canonical(), D};
    }
  }
  throw NumericError("periodic-point", "Newton on R^p(z) = z did not converge");
}

double escape_radius(const RationalMap& R) {
  const Poly& P = R.numerator();
  const double q = std::abs(R.denominator().c[0]);
  double s = 0.0;
  for (int k = 0; k < P.degree(); ++k) s += std::abs(P.c[k]);
  return 2.0 + q + s;
}

JuliaStatus classify_in_julia(const RationalMap& R, int index, const ClassifyOptions& opt,
                              std::string* evidence) {
  auto say = [&](const std::string& s) {
    if (evidence) *evidence = s;
  };
  if (auto it = opt.overrides.find(index); it != opt.overrides.end()) {
    say("user override");
    return it->second;
  }
  const SpherePoint c = R.critical_points().at(index).point;
  const bool poly = R.is_polynomial();
  if (poly && c.is_infinity()) {
    say("superattracting fixed point at infinity");
    return JuliaStatus::No;
  }
  const double esc = poly ? escape_radius(R) : 0.0;
  std::vector<SpherePoint> orb{c};
  for (int n = 1; n <= opt.depth; ++n) {
    orb.push_back(R(orb.back()));
    const SpherePoint& z = orb.back();
    if (poly && (z.is_infinity() || std::abs(z.finite()) > esc)) {
      std::ostringstream os;
      os << "orbit escapes to infinity at step " << n;
      say(os.str());
      return JuliaStatus::No;
    }
    for (int p = 1; p <= opt.max_period && p <= n; ++p) {
      if (chordal_distance(z, orb[n - p]) >= opt.cycle_tol) continue;
      SpherePoint zeta;
      Complex lambda;
      try {
        std::tie(zeta, lambda) = refine_periodic_point(R, z, p);
      } catch (const NumericError&) {
        continue;
      }
      const double m = std::abs(lambda);
      std::ostringstream os;
      os << "cycle of period " << p << " with |multiplier| " << m << " reached at step " << n;
      if (m < 1.0 - opt.neutral_tol) {
        say("attracted: " + os.str());
        return JuliaStatus::No;
      }
      if (m <= 1.0 + opt.neutral_tol) {
        say("neutral: " + os.str());
        return JuliaStatus::Undetermined;
      }
      if (chordal_distance(z, zeta) < 1e-9) {
        say("lands on repelling " + os.str());
        return JuliaStatus::Yes;
      }
    }
  }
  // Bounded and not attracted: look for a repelling cycle near the tail.
  for (int p = 1; p <= 6; ++p) {
    try {
      auto [zeta, lambda] = refine_periodic_point(R, orb.back(), p);
      if (std::abs(lambda) > 1.0 + opt.neutral_tol && chordal_distance(zeta, orb.back()) < 0.1) {
        std::ostringstream os;
        os << "bounded non-attracted orbit for " << opt.depth << " steps; repelling cycle witness of period "
           << p;
        say(os.str());
        return JuliaStatus::Yes;
      }
    } catch (const NumericError&) {
    }
  }
  say("no attracting or repelling witness within depth");
  return JuliaStatus::Undetermined;
}

void RationalMap::classify(const ClassifyOptions& opt) {
  for (std::size_t i = 0; i < crit_.size(); ++i) {
    std::string ev;
    crit_[i].in_julia = classify_in_julia(*this, static_cast<int>(i), opt, &ev);
    crit_[i].evidence = ev;
  }
  build_blocks(opt.depth, 1e-9);
}

void RationalMap::build_blocks(int depth, double tol) {
  const int n = static_cast<int>(crit_.size());
  std::vector<int> next(n, -1);
  auto julia = [&](int k) { return crit_[k].in_julia == JuliaStatus::Yes; };
  for (int j = 0; j < n; ++j) {
    if (!julia(j)) continue;
    SpherePoint z = crit_[j].point;
    for (int m = 1; m <= depth && next[j] < 0; ++m) {
      z = (*this)(z);
      bool self = false;
      for (int k = 0; k < n; ++k) {
        if (!julia(k) || chordal_distance(z, crit_[k].point) >= tol) continue;
        if (k == j) self = true;
        else next[j] = k;
        break;
      }
      if (self) break;
    }
  }
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (int j = 0; j < n; ++j)
    if (next[j] >= 0) parent[find(j)] = find(next[j]);

  // Steps until the chain stops; cycles get the same large value.
  auto height = [&](int j) {
    int h = 0;
    for (int k = j; next[k] >= 0 && h <= n; k = next[k]) ++h;
    return h;
  };
  blocks_.clear();
  std::vector<int> block_of(n, -1);
  for (int j = 0; j < n; ++j) {
    const int r = find(j);
    if (block_of[r] < 0) {
      block_of[r] = static_cast<int>(blocks_.size());
      blocks_.push_back({});
      blocks_.back().id = block_of[r];
    }
    blocks_[block_of[r]].members.push_back(j);
  }
  for (auto& b : blocks_) {
    std::stable_sort(b.members.begin(), b.members.end(),
                     [&](int a, int c) { return height(a) > height(c); });
    b.tail = b.members.back();
    b.multiplicity = 1;
    b.in_julia = true;
    for (int m : b.members) {
      b.multiplicity *= crit_[m].local_degree;
      if (crit_[m].in_julia != JuliaStatus::Yes) b.in_julia = false;
      crit_[m].block_id = b.id;
    }
    b.value = crit_[b.tail].image;
  }
}

}  // namespace bctk
