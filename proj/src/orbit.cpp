#include "bctk/orbit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace bctk {

const char* to_string(OrbitFate f) {
  switch (f) {
    case OrbitFate::Escapes: return "escapes";
    case OrbitFate::Attracted: return "attracted";
    case OrbitFate::Bounded: return "bounded";
  }
  return "?";
}

namespace {

double distance_to_crit(const RationalMap& R, const SpherePoint& z) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : R.critical_points()) best = std::min(best, chordal_distance(z, c.point));
  return best;
}

/// |multiplier| of a cycle of period <= 12 that the tail of the orbit sits
/// on, or a negative number.
double tail_cycle_multiplier(const RationalMap& R, const std::vector<SpherePoint>& pts, double tol) {
  const int n = static_cast<int>(pts.size()) - 1;
  for (int p = 1; p <= 12 && p <= n; ++p) {
    if (chordal_distance(pts[n], pts[n - p]) >= tol) continue;
    try {
      return std::abs(refine_periodic_point(R, pts[n], p).second);
    } catch (const NumericError&) {
    }
  }
  return -1.0;
}

bool near_parabolic(const RationalMap& R, const SpherePoint& z) {
  // Slow convergence to a neutral cycle: a close return with derivative
  // nearly of modulus one.
  for (int p = 1; p <= 6; ++p) {
    SpherePoint q = z;
    double logd = 0.0;
    for (int k = 0; k < p; ++k) {
      logd += std::log(R.spherical_derivative(q));
      q = R(q);
    }
    if (chordal_distance(q, z) < 1e-2 && std::abs(logd) < 0.05) return true;
  }
  return false;
}

}  // namespace

OrbitRecord orbit_record(const RationalMap& R, const SpherePoint& z, int n) {
  if (n < 0) throw PreconditionError("orbit length must be >= 0");
  OrbitRecord rec;
  rec.start = z.canonical();
  rec.points.reserve(n + 1);
  rec.log_derivatives.reserve(n + 1);
  rec.points.push_back(rec.start);
  rec.log_derivatives.push_back(0.0);
  const bool poly = R.is_polynomial();
  const double esc = poly ? escape_radius(R) : 0.0;
  bool escaped = false;
  for (int k = 0; k < n; ++k) {
    const SpherePoint& p = rec.points.back();
    rec.log_derivatives.push_back(rec.log_derivatives.back() + std::log(R.spherical_derivative(p)));
    rec.points.push_back(R(p));
    const SpherePoint& q = rec.points.back();
    if (poly && (q.is_infinity() || std::abs(q.finite()) > esc)) escaped = true;
  }
  if (escaped) {
    rec.fate = OrbitFate::Escapes;
  } else {
    const double m = tail_cycle_multiplier(R, rec.points, 1e-7);
    rec.fate = (m >= 0.0 && m < 1.0 - 1e-6) ? OrbitFate::Attracted : OrbitFate::Bounded;
  }
  return rec;
}

std::vector<ExposureReport> exposed_critical_values(const RationalMap& R, int depth, double tol) {
  if (depth < 0) throw PreconditionError("depth must be >= 0");
  std::vector<ExposureReport> out;
  const auto& crit = R.critical_points();
  for (std::size_t i = 0; i < crit.size(); ++i) {
    bool dup = false;
    for (const auto& e : out) dup = dup || chordal_distance(e.value, crit[i].image) < 1e-12;
    if (dup) continue;
    ExposureReport e;
    e.critical_index = static_cast<int>(i);
    e.value = crit[i].image;
    e.in_julia = crit[i].in_julia == JuliaStatus::Yes;
    e.min_distance = std::numeric_limits<double>::infinity();
    SpherePoint z = e.value;
    for (int k = 0; k <= depth; ++k) {
      e.min_distance = std::min(e.min_distance, distance_to_crit(R, z));
      if (k < depth) z = R(z);
    }
    e.exposed = e.min_distance > tol;
    out.push_back(e);
  }
  return out;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  LineFit f;
  const std::size_t n = x.size();
  f.points = static_cast<int>(n);
  if (n < 2) return f;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (n > 2) {
    double ss = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y[i] - (f.intercept + f.slope * x[i]);
      ss += r * r;
    }
    f.std_error = std::sqrt(ss / (n - 2) / sxx);
  }
  return f;
}

namespace {

OrbitRecord checked_record(const RationalMap& R, const SpherePoint& v, int n, double tol) {
  OrbitRecord rec = orbit_record(R, v, n);
  for (std::size_t k = 0; k < rec.points.size(); ++k)
    if (distance_to_crit(R, rec.points[k]) <= tol) {
      std::ostringstream os;
      os << "orbit of the critical value meets a critical point at step " << k;
      throw NumericError("degenerate-orbit", os.str());
    }
  return rec;
}

LineFit growth_fit(const OrbitRecord& rec, int upto) {
  std::vector<double> x, y;
  for (int n = (upto + 1) / 2; n <= upto; ++n) {
    x.push_back(n);
    y.push_back(rec.log_derivatives[n]);
  }
  return fit_line(x, y);
}

int index_of_value(const RationalMap& R, const SpherePoint& v) {
  const auto& crit = R.critical_points();
  for (std::size_t i = 0; i < crit.size(); ++i)
    if (chordal_distance(crit[i].image, v) < 1e-12) return static_cast<int>(i);
  return -1;
}

}  // namespace

CEReport check_collet_eckmann_at(const RationalMap& R, const SpherePoint& v, int depth, double tol) {
  if (depth < 1) throw PreconditionError("depth must be >= 1");
  CEReport rep;
  rep.value = v.canonical();
  rep.depth = depth;
  rep.critical_index = index_of_value(R, v);
  if (rep.critical_index >= 0)
    rep.in_julia = R.critical_points()[rep.critical_index].in_julia == JuliaStatus::Yes;
  const OrbitRecord rec = checked_record(R, v, depth, tol);
  rep.parabolic = near_parabolic(R, rec.points.back());
  if (depth < 4) return rep;
  const LineFit f = growth_fit(rec, depth);
  rep.lambda_hat = f.slope;
  rep.std_error = f.std_error;
  rep.verdict = (f.slope > 0.0 && f.slope > 3.0 * f.std_error) ? Verdict::Holds : Verdict::Fails;
  return rep;
}

std::vector<CEReport> check_collet_eckmann(const RationalMap& R, int depth, double tol) {
  std::vector<CEReport> out;
  for (const auto& e : exposed_critical_values(R, depth, tol)) {
    if (!e.exposed) {
      CEReport rep;
      rep.critical_index = e.critical_index;
      rep.value = e.value;
      rep.in_julia = e.in_julia;
      rep.exposed = false;
      rep.depth = depth;
      out.push_back(rep);
      continue;
    }
    out.push_back(check_collet_eckmann_at(R, e.value, depth, tol));
    out.back().critical_index = e.critical_index;
  }
  return out;
}

SummabilityReport check_summability_at(const RationalMap& R, const SpherePoint& v, double beta, int depth,
                                       double tol) {
  if (!(beta > 0.0 && beta <= 1.0)) throw PreconditionError("beta must lie in (0, 1]");
  if (depth < 0) throw PreconditionError("depth must be >= 0");
  SummabilityReport rep;
  rep.value = v.canonical();
  rep.beta = beta;
  rep.depth = depth;
  rep.critical_index = index_of_value(R, v);
  if (rep.critical_index >= 0)
    rep.in_julia = R.critical_points()[rep.critical_index].in_julia == JuliaStatus::Yes;
  const OrbitRecord rec = checked_record(R, v, depth + 1, tol);
  for (int j = 0; j <= depth; ++j) rep.partial_sum += std::exp(-beta * rec.log_derivatives[j + 1]);
  rep.tail_bound = std::numeric_limits<double>::infinity();
  if (depth + 1 < 4) return rep;
  const LineFit f = growth_fit(rec, depth + 1);
  rep.lambda_hat = f.slope;
  if (f.slope <= 0.0) {
    rep.verdict = Verdict::Fails;
    return rep;
  }
  const double q = std::exp(-beta * f.slope);
  rep.tail_bound = std::exp(-beta * rec.log_derivatives[depth + 1]) * q / (1.0 - q);
  if (rep.tail_bound < 0.1 * rep.partial_sum) rep.verdict = Verdict::Holds;
  return rep;
}

std::vector<SummabilityReport> check_summability(const RationalMap& R, double beta, int depth, double tol) {
  std::vector<SummabilityReport> out;
  for (const auto& e : exposed_critical_values(R, depth + 1, tol)) {
    if (!e.exposed) {
      SummabilityReport rep;
      rep.critical_index = e.critical_index;
      rep.value = e.value;
      rep.in_julia = e.in_julia;
      rep.exposed = false;
      rep.beta = beta;
      rep.depth = depth;
      rep.tail_bound = std::numeric_limits<double>::infinity();
      out.push_back(rep);
      continue;
    }
    out.push_back(check_summability_at(R, e.value, beta, depth, tol));
    out.back().critical_index = e.critical_index;
  }
  return out;
}

namespace {
template <class Rep>
Verdict joint(const std::vector<Rep>& reports) {
  Verdict v = Verdict::Holds;
  for (const auto& r : reports) {
    if (!r.in_julia) continue;
    if (r.verdict == Verdict::Fails) return Verdict::Fails;
    if (r.verdict == Verdict::Undetermined) v = Verdict::Undetermined;
  }
  return v;
}
}  // namespace

Verdict julia_verdict(const std::vector<CEReport>& reports) { return joint(reports); }
Verdict julia_verdict(const std::vector<SummabilityReport>& reports) { return joint(reports); }

SlowRecurrenceFit slow_recurrence_fit(const RationalMap& R, const SpherePoint& v, int depth, std::size_t budget) {
  if (depth < 1) throw PreconditionError("slow recurrence fit needs depth >= 1");
  SlowRecurrenceFit fit;
  std::vector<SpherePoint> level;
  for (const auto& c : R.critical_points()) level.push_back(c.point);
  for (int k = 1; k <= depth; ++k) {
    std::vector<SpherePoint> next;
    for (const auto& z : level)
      for (const auto& p : R.preimages(z)) next.push_back(p.point);
    if (fit.nodes + next.size() > budget) {
      fit.complete = false;
      break;
    }
    fit.nodes += next.size();
    double m = std::numeric_limits<double>::infinity();
    for (const auto& z : next) m = std::min(m, chordal_distance(z, v));
    fit.min_distance.push_back(m);
    if (m < 1e-12) fit.degenerate = true;
    level = std::move(next);
  }
  if (fit.degenerate || fit.min_distance.size() < 2) return fit;
  std::vector<double> x, y;
  for (std::size_t i = 0; i < fit.min_distance.size(); ++i) {
    x.push_back(static_cast<double>(i + 1));
    y.push_back(std::log(fit.min_distance[i]));
  }
  const LineFit f = fit_line(x, y);
  fit.theta_raw = std::exp(f.slope);
  fit.theta = std::min(fit.theta_raw, 1.0 - 1e-12);
  fit.C1 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < fit.min_distance.size(); ++i)
    fit.C1 = std::min(fit.C1, fit.min_distance[i] / std::pow(fit.theta, static_cast<double>(i + 1)));
  return fit;
}

}  // namespace bctk
