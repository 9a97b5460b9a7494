#include "bctk/shrinking.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bctk/orbit.hpp"

namespace bctk {

ShrinkingSchedule shrinking_schedule(const std::vector<std::vector<double>>& derivatives, double beta,
                                     const std::vector<double>& eta) {
  if (derivatives.empty()) throw PreconditionError("schedule needs at least one value");
  if (!(beta > 0.0 && beta <= 1.0)) throw PreconditionError("beta must lie in (0, 1]");
  std::size_t N = derivatives.front().size();
  for (const auto& row : derivatives) N = std::min(N, row.size());
  if (N == 0) throw PreconditionError("schedule needs at least one derivative");
  if (!eta.empty() && eta.size() < N) throw PreconditionError("eta must cover the truncation depth");

  std::vector<double> w(N, 0.0);
  for (std::size_t j = 0; j < N; ++j) {
    for (const auto& row : derivatives) {
      if (!(row[j] > 0.0) || !std::isfinite(row[j])) throw PreconditionError("derivatives must be positive");
      w[j] = std::max(w[j], std::pow(row[j], -beta));
    }
    if (!eta.empty()) {
      if (!(eta[j] > 0.0)) throw PreconditionError("eta must be positive");
      w[j] *= eta[j];
    }
  }
  double q = 0.0;
  if (N >= 2) {
    q = w[N - 1] / w[N - 2];
    if (q >= 1.0) throw NumericError("infeasible-schedule", "weights do not decay; the product cannot balance at 1/2");
  }
  const double wmax = *std::max_element(w.begin(), w.end());

  auto log_tail = [&](double D) {
    double s = 0.0;
    if (N < 2) return s;
    double t = D * w[N - 1];
    for (int m = 0; m < 100000; ++m) {
      t *= q;
      if (t < 1e-18) break;
      s += std::log1p(-t);
    }
    return s;
  };
  auto log_product = [&](double D) {
    double s = 0.0;
    for (double x : w) s += std::log1p(-D * x);
    return s + log_tail(D);
  };
  const double target = std::log(0.5);
  double lo = 0.0, hi = 1.0 / wmax;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (log_product(mid) > target ? lo : hi) = mid;
  }
  ShrinkingSchedule s;
  s.scale = 0.5 * (lo + hi);
  s.D.push_back(1.0);
  for (double x : w) {
    s.d.push_back(s.scale * x);
    s.D.push_back(s.D.back() * (1.0 - s.d.back()));
  }
  s.tail_factor = std::exp(log_tail(s.scale));
  s.residual = std::abs(s.D.back() * s.tail_factor - 0.5);
  if (s.residual > 1e-9) throw NumericError("infeasible-schedule", "scale calibration did not reach 1/2");
  return s;
}

DiskMap mobius_disk_map(Complex a, double rotation) {
  if (!(std::abs(a) < 1.0)) throw PreconditionError("Mobius center must lie in the unit disk");
  const Complex u = std::polar(1.0, rotation);
  DiskMap m;
  m.xi = a;
  m.f = [a, u](Complex z) { return u * (z - a) / (1.0 - std::conj(a) * z); };
  m.df = [a, u](Complex z) {
    const Complex den = 1.0 - std::conj(a) * z;
    return u * (1.0 - std::norm(a)) / (den * den);
  };
  return m;
}

DiskMap pullback_disk_map(const RationalMap& R, int n, Complex center, double radius, Complex xi) {
  if (n < 0) throw PreconditionError("iterate count must be >= 0");
  if (!(radius > 0.0)) throw PreconditionError("radius must be positive");
  auto image = [&R, n](Complex z, Complex* deriv) {
    Complex d(1.0, 0.0);
    for (int k = 0; k < n; ++k) {
      d *= R.planar_derivative(z);
      z = R(z);
    }
    if (deriv) *deriv = d;
    return z;
  };
  DiskMap m;
  m.xi = xi;
  m.f = [image, center, radius](Complex z) { return (image(z, nullptr) - center) / radius; };
  m.df = [image, radius](Complex z) {
    Complex d;
    image(z, &d);
    return d / radius;
  };
  if (std::abs(m.f(xi)) > 1e-9) throw NumericError("normalization", "f(xi) is not 0");
  return m;
}

double koebe_pair_residual(const DiskMap& map, Complex v, KoebeForm form) {
  const Complex zeta = map.f(v);
  const double r = std::abs(zeta);
  if (!(r < 1.0)) throw PreconditionError("v must lie in the domain of the disk map");
  const double lhs = std::abs(map.xi - v) * std::abs(map.df(v));
  const double den = form == KoebeForm::Corrected ? 1.0 - r : std::abs(1.0 - zeta);
  return lhs - 2.0 * r / den;
}

std::vector<UnivalentTime> univalent_times(const RationalMap& R, const SpherePoint& v, int critical_index,
                                           int depth, const UnivalentTimeOptions& opt) {
  const auto& crit = R.critical_points();
  if (critical_index < 0 || critical_index >= static_cast<int>(crit.size()))
    throw PreconditionError("critical index out of range");
  std::vector<UnivalentTime> out;
  if (depth < 1) return out;
  const SpherePoint c = crit[critical_index].point;
  const SpherePoint Rc = crit[critical_index].image;
  const OrbitRecord rec = orbit_record(R, v, depth + 1);
  // The closed ball is certified through a slightly larger open one.
  constexpr double enlarge = 1.02;

  for (int k = 1; k <= depth; ++k) {
    if (!(chordal_distance(rec.points[k], c) < opt.r_K)) continue;
    UnivalentTime t;
    t.k = k;
    t.local_degree = crit[critical_index].local_degree;
    t.radius = chordal_distance(rec.points[k + 1], Rc);
    t.derivative = std::exp(rec.log_derivatives[k + 1]);
    if (!(t.radius > 0.0)) {
      t.note = "orbit meets the critical point";
      out.push_back(t);
      continue;
    }
    try {
      const PullbackComponent top = tilde_ball(R, critical_index, enlarge * t.radius, opt.samples, 1.0);
      if (!top.domain.contains(rec.points[k])) continue;
      Domain cur = top.domain;
      SpherePoint xi = c;
      bool univalent = true;
      for (int j = k - 1; j >= 0 && univalent; --j) {
        const auto comps = pullback_components(R, cur);
        const PullbackComponent* hit = nullptr;
        for (const auto& comp : comps)
          if (comp.domain.contains(rec.points[j])) hit = &comp;
        if (!hit) throw NumericError("numeric-failure", "orbit point outside every pull-back component");
        if (!hit->univalent()) {
          univalent = false;
          break;
        }
        bool found = false;
        for (const auto& p : R.preimages(xi))
          if (hit->domain.contains(p.point)) {
            xi = p.point;
            found = true;
            break;
          }
        if (!found) throw NumericError("numeric-failure", "preimage of c missing from a univalent pull-back");
        cur = hit->domain;
      }
      if (!univalent) continue;
      t.xi = xi;
      t.dist_xi_v = chordal_distance(xi, v);
      t.certified = true;
    } catch (const std::exception& e) {
      t.note = e.what();
    }
    out.push_back(t);
  }
  return out;
}

std::vector<RhoRow> rho_evaluators(const std::vector<UnivalentTime>& data, const RhoConstants& K,
                                   const std::vector<double>& deltas, int truncation_depth) {
  if (!(K.beta > 0.0 && K.beta <= 1.0)) throw PreconditionError("beta must lie in (0, 1]");
  if (!(K.kappa0 > 0.0 && K.kappa0 < 1.0)) throw PreconditionError("kappa0 must lie in (0, 1)");
  const double inf = std::numeric_limits<double>::infinity();
  auto eta = [&](int j) { return K.eta ? K.eta(j) : 1.0; };
  std::vector<RhoRow> rows;
  for (double delta : deltas) {
    if (!(delta > 0.0)) throw PreconditionError("delta must be positive");
    RhoRow row;
    row.delta = delta;
    row.truncation_depth = truncation_depth;
    row.rho = row.rho1 = inf;
    for (const auto& t : data) {
      if (!t.certified || t.k > truncation_depth) continue;
      if (t.dist_xi_v >= delta) {
        const double val = K.C * (t.dist_xi_v / delta) * std::pow(t.derivative, 1.0 - K.beta) * eta(t.k + 1);
        row.rho = std::min(row.rho, val);
      } else {
        const double val = K.C0 * std::pow(delta / t.dist_xi_v, t.local_degree - 1) * t.derivative;
        row.rho1 = std::min(row.rho1, val);
      }
    }
    row.rho_empty = row.rho == inf;
    row.rho1_empty = row.rho1 == inf;
    row.r0 = std::min(0.5 * K.kappa0 * row.rho, row.rho1);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace bctk
