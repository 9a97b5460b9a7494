#include "bctk/thurston.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>

#include "bctk/poly.hpp"

namespace bctk {

namespace {

constexpr double kMerge = 1e-9;

Poly power(const Poly& p, int k) {
  Poly out{{Complex(1.0)}};
  for (int i = 0; i < k; ++i) out = out * p;
  return out;
}

/// Homogeneous composition: numerator and denominator of R o (N / D).
std::pair<Poly, Poly> compose_homogeneous(const RationalMap& R, const Poly& N, const Poly& D) {
  const int d = R.degree();
  Poly num{{Complex(0.0)}}, den{{Complex(0.0)}};
  for (int k = 0; k <= d; ++k) {
    const Poly term = power(N, k) * power(D, d - k);
    if (k < static_cast<int>(R.numerator().c.size())) num = num + R.numerator().c[k] * term;
    if (k < static_cast<int>(R.denominator().c.size())) den = den + R.denominator().c[k] * term;
  }
  return {num, den};
}

int exact_period(const RationalMap& R, const SpherePoint& z, int p) {
  SpherePoint w = z;
  for (int q = 1; q <= p; ++q) {
    w = R(w);
    if (chordal_distance(w, z) < kMerge) return q;
  }
  return 0;
}

/// F'/F for F = X_p - z Y_p, where (X_k, Y_k) are the homogeneous iterates of
/// (z, 1); rescaled at every step so that escaping points do not overflow.
Complex log_derivative(const RationalMap& R, int p, Complex z) {
  const auto& N = R.numerator().c;
  const auto& D = R.denominator().c;
  Complex X = z, Y = 1.0, dX = 1.0, dY = 0.0;
  for (int k = 0; k < p; ++k) {
    const int d = R.degree();
    Complex nx = 0, ny = 0, dnx = 0, dny = 0;
    for (int j = 0; j <= d; ++j) {
      const Complex a = j < static_cast<int>(N.size()) ? N[j] : 0.0;
      const Complex b = j < static_cast<int>(D.size()) ? D[j] : 0.0;
      if (a == 0.0 && b == 0.0) continue;
      const Complex m = std::pow(X, j) * std::pow(Y, d - j);
      const Complex dm = (j > 0 ? double(j) * std::pow(X, j - 1) * std::pow(Y, d - j) * dX : 0.0) +
                         (d - j > 0 ? double(d - j) * std::pow(X, j) * std::pow(Y, d - j - 1) * dY : 0.0);
      nx += a * m;
      ny += b * m;
      dnx += a * dm;
      dny += b * dm;
    }
    const double s = 1.0 / std::max(std::abs(nx), std::abs(ny));
    X = nx * s, Y = ny * s, dX = dnx * s, dY = dny * s;
  }
  const Complex F = X - z * Y, dF = dX - Y - z * dY;
  return dF / F;
}

/// Aberth iteration on the roots of R^p(z) - z without expanding coefficients.
std::vector<Complex> implicit_fixed_points(const RationalMap& R, int p, int n, double radius) {
  std::vector<Complex> z(n);
  for (int i = 0; i < n; ++i) z[i] = std::polar(radius, 2.0 * std::numbers::pi * (i + 0.25) / n);
  for (int it = 0; it < 2000; ++it) {
    double moved = 0.0;
    for (int i = 0; i < n; ++i) {
      const Complex ratio = log_derivative(R, p, z[i]);
      if (!std::isfinite(std::abs(ratio))) continue;
      Complex sum = 0.0;
      for (int j = 0; j < n; ++j)
        if (j != i) sum += 1.0 / (z[i] - z[j]);
      const Complex step = 1.0 / (ratio - sum);
      if (!std::isfinite(std::abs(step))) continue;
      z[i] -= step;
      moved = std::max(moved, std::abs(step) / (1.0 + std::abs(z[i])));
    }
    if (moved < 1e-14) break;
  }
  return z;
}

Complex eval(const std::vector<Complex>& c, Complex z, int deriv = 0) {
  Complex s = 0.0;
  for (int i = static_cast<int>(c.size()) - 1; i >= deriv; --i) {
    double f = 1.0;
    for (int j = 0; j < deriv; ++j) f *= i - j;
    s = s * z + f * c[i];
  }
  return s;
}

/// Q_k and the critical positions y_c from the target positions x_sigma(c).
struct Solved {
  std::vector<Complex> poly;
  std::map<int, Complex> y;
};

std::vector<MarkedCritical> finite_critical(const MarkedDynamics& dyn) {
  std::vector<MarkedCritical> out;
  const int inf = dyn.infinity_index();
  for (const auto& c : dyn.critical)
    if (c.index != inf) out.push_back(c);
  return out;
}

Solved solve_q(const MarkedDynamics& dyn, const std::vector<Complex>& x, const std::vector<Complex>& seed) {
  const int d = dyn.degree;
  const auto crit = finite_critical(dyn);
  Solved s;
  if (d == 2) {
    // z^2 + c has its critical point at 0 and c = Q(0).
    s.poly = {x[dyn.sigma[crit[0].index]], 0.0, 1.0};
    s.y[crit[0].index] = 0.0;
    return s;
  }
  const int m = static_cast<int>(crit.size());
  const int n = d - 1 + m;
  Eigen::VectorXcd u(n);
  for (int i = 0; i + 1 < d; ++i) u(i) = seed[i];
  for (int j = 0; j < m; ++j) u(d - 1 + j) = x[crit[j].index];
  double scale = 1.0;
  for (const auto& c : crit) scale = std::max(scale, std::abs(x[dyn.sigma[c.index]]));
  auto coeffs = [d](const Eigen::VectorXcd& v) {
    std::vector<Complex> c(d + 1, 0.0);
    for (int i = 0; i + 1 < d; ++i) c[i] = v(i);
    c[d] = 1.0;
    return c;
  };
  double res = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 60; ++it) {
    const auto c = coeffs(u);
    Eigen::VectorXcd F(n);
    Eigen::MatrixXcd J = Eigen::MatrixXcd::Zero(n, n);
    int row = 0;
    for (int j = 0; j < m; ++j) {
      const Complex y = u(d - 1 + j);
      for (int k = 0; k < crit[j].mu; ++k, ++row) {
        F(row) = eval(c, y, k) - (k == 0 ? x[dyn.sigma[crit[j].index]] : Complex(0.0));
        for (int i = 0; i + 1 < d; ++i) {
          if (i < k) continue;
          double f = 1.0;
          for (int t = 0; t < k; ++t) f *= i - t;
          J(row, i) = f * std::pow(y, i - k);
        }
        J(row, d - 1 + j) = eval(c, y, k + 1);
      }
    }
    res = F.cwiseAbs().maxCoeff();
    if (res < 1e-13 * scale) break;
    const Eigen::VectorXcd step = J.colPivHouseholderQr().solve(F);
    u -= step;
    if (step.cwiseAbs().maxCoeff() < 1e-16 * scale) break;
  }
  if (!(res < 1e-10 * scale)) throw NumericError("numeric-failure", "Q_k interpolation residual above 1e-10");
  s.poly = coeffs(u);
  for (int j = 0; j < m; ++j) s.y[crit[j].index] = u(d - 1 + j);
  return s;
}

void check_distinct(const std::vector<Complex>& x, int inf) {
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) {
      if (static_cast<int>(i) == inf || static_cast<int>(j) == inf) continue;
      if (std::abs(x[i] - x[j]) < 1e-10 * (1.0 + std::abs(x[i])))
        throw NumericError("degenerate-state", "marked points " + std::to_string(j) + " and " + std::to_string(i) +
                                                   " collide");
    }
}

}  // namespace

std::vector<PeriodicPoint> repelling_periodic_points(const RationalMap& R, int max_period) {
  if (max_period < 1) throw PreconditionError("max_period must be >= 1");
  std::vector<PeriodicPoint> out;
  auto known = [&out](const SpherePoint& z) {
    return std::any_of(out.begin(), out.end(), [&](const PeriodicPoint& p) { return chordal_distance(p.z, z) < kMerge; });
  };
  Poly N = R.numerator(), D = R.denominator();
  for (int p = 1; p <= max_period; ++p) {
    if (p > 1) std::tie(N, D) = compose_homogeneous(R, N, D);
    std::vector<SpherePoint> seeds;
    const Poly F = N - Poly{{Complex(0.0), Complex(1.0)}} * D;
    RootOptions ro;
    ro.residual_tol = 1e-6;
    try {
      for (const auto& z : aberth_roots(F, ro)) seeds.push_back(SpherePoint::from_complex(z));
    } catch (const NumericError&) {
      double radius = 1.0;
      for (std::size_t k = 0; k + 1 < F.c.size(); ++k)
        radius = std::max(radius, 2.0 * std::pow(std::abs(F.c[k] / F.c[F.degree()]), 1.0 / (F.degree() - k)));
      for (const auto& z : implicit_fixed_points(R, p, F.degree(), radius)) seeds.push_back(SpherePoint::from_complex(z));
    }
    seeds.push_back(SpherePoint::infinity());
    for (const auto& s : seeds) {
      SpherePoint z;
      Complex lambda;
      try {
        std::tie(z, lambda) = refine_periodic_point(R, s, p);
      } catch (const NumericError&) {
        continue;
      }
      if (exact_period(R, z, p) != p || std::abs(lambda) <= 1.0 + 1e-6 || known(z)) continue;
      out.push_back({z, p, lambda});
    }
  }
  return out;
}

std::vector<TargetValue> choose_target_values(const RationalMap& R, double delta, int depth,
                                              const TargetOptions& opt) {
  if (!(delta > 0.0)) throw PreconditionError("delta must be positive");
  if (!(2.0 * delta < 1.0)) throw PreconditionError("2 delta must be < 1");
  if (depth < 0) throw PreconditionError("depth must be >= 0");
  const auto blocks = R.julia_blocks();
  std::vector<TargetValue> best(blocks.size());
  if (blocks.empty()) return {};
  std::vector<Domain> balls;
  for (std::size_t i = 0; i < R.critical_points().size(); ++i)
    if (R.critical_points()[i].in_julia == JuliaStatus::Yes)
      balls.push_back(tilde_ball(R, static_cast<int>(i), 2.0 * delta, opt.samples, 1.0).domain);
  auto clearance = [&balls](const SpherePoint& z) {
    double c = std::numeric_limits<double>::infinity();
    for (const auto& b : balls) c = std::min(c, b.distance_to(z));
    return c;
  };

  const auto periodic = repelling_periodic_points(R, opt.max_period);
  struct Node {
    SpherePoint z;
    int parent, depth, root;
  };
  std::vector<std::vector<SpherePoint>> cycles;
  std::vector<Node> nodes;
  for (const auto& p : periodic) {
    cycles.push_back(orbit(R, p.z, p.period - 1));
    nodes.push_back({p.z, -1, 0, static_cast<int>(cycles.size()) - 1});
  }
  std::vector<bool> found(blocks.size(), false);
  double closest = std::numeric_limits<double>::infinity();
  std::size_t next = 0;
  for (; next < nodes.size(); ++next) {
    const Node nd = nodes[next];
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      const auto& blk = R.critical_blocks()[blocks[b]];
      const double dist = chordal_distance(nd.z, blk.value);
      closest = std::min(closest, dist);
      if (!(dist < delta)) continue;
      if (found[b] && (dist > best[b].distance || (dist == best[b].distance && nd.depth >= best[b].preperiod)))
        continue;
      TargetValue t;
      t.block = blk.id;
      t.v = nd.z;
      t.distance = dist;
      t.preperiod = nd.depth;
      t.period = static_cast<int>(cycles[nd.root].size());
      for (int k = static_cast<int>(next); k >= 0; k = nodes[k].parent) t.orbit.push_back(nodes[k].z);
      for (std::size_t k = 1; k < cycles[nd.root].size(); ++k) t.orbit.push_back(cycles[nd.root][k]);
      t.clearance = std::numeric_limits<double>::infinity();
      for (std::size_t n = t.preperiod == 0 ? 0 : 1; n < t.orbit.size(); ++n)
        t.clearance = std::min(t.clearance, clearance(t.orbit[n]));
      if (!(t.clearance > 0.0)) continue;
      best[b] = t;
      found[b] = true;
    }
    if (nd.depth >= depth || nodes.size() >= opt.budget) continue;
    for (const auto& pre : R.preimages(nd.z)) {
      const auto& cyc = cycles[nd.root];
      if (std::any_of(cyc.begin(), cyc.end(), [&](const SpherePoint& c) { return chordal_distance(c, pre.point) < kMerge; }))
        continue;
      nodes.push_back({pre.point, static_cast<int>(next), nd.depth + 1, nd.root});
    }
  }
  for (std::size_t b = 0; b < blocks.size(); ++b)
    if (!found[b]) {
      std::ostringstream os;
      os << "no admissible target for block " << blocks[b] << ": " << periodic.size()
         << " repelling points of period <= " << opt.max_period << ", " << nodes.size()
         << " backward nodes to depth " << depth << ", closest distance " << closest;
      throw NumericError("not-found", os.str());
    }
  return best;
}

int MarkedDynamics::infinity_index() const {
  for (std::size_t i = 0; i < marked.size(); ++i)
    if (marked[i].is_infinity()) return static_cast<int>(i);
  return -1;
}

void MarkedDynamics::validate() const {
  if (degree < 2) throw PreconditionError("degree must be >= 2");
  if (normalization != "monic-centered") throw PreconditionError("only monic-centered normalization is supported");
  const int n = static_cast<int>(marked.size());
  if (static_cast<int>(sigma.size()) != n) throw PreconditionError("sigma must be total on the marked set");
  for (int s : sigma)
    if (s < 0 || s >= n) throw PreconditionError("sigma index out of range");
  const int inf = infinity_index();
  if (inf < 0) throw PreconditionError("infinity must be marked");
  if (sigma[inf] != inf) throw PreconditionError("infinity must be fixed");
  for (int i = 0; i < n; ++i)
    if (i != inf && sigma[i] == inf) throw PreconditionError("finite marked point mapped to infinity");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j)
      if (chordal_distance(marked[i], marked[j]) < kMerge) throw PreconditionError("marked points coincide");
  int finite_sum = 0;
  bool inf_critical = false;
  std::vector<bool> seen(n, false);
  for (const auto& c : critical) {
    if (c.index < 0 || c.index >= n || seen[c.index]) throw PreconditionError("bad critical index");
    seen[c.index] = true;
    if (c.mu < 2 || c.mu > degree) throw PreconditionError("local degree out of range");
    if (c.index == inf) {
      if (c.mu != degree) throw PreconditionError("infinity must have local degree d");
      inf_critical = true;
    } else {
      finite_sum += c.mu - 1;
    }
  }
  if (!inf_critical) throw PreconditionError("infinity must be listed as critical");
  if (finite_sum != degree - 1) throw PreconditionError("finite critical data must satisfy Riemann-Hurwitz");
}

namespace {

// A critical orbit that merges into its own tail on an attracting,
// non-superattracting cycle is converging, not landing.
bool closes_on_attracting_cycle(const RationalMap& R, const MarkedDynamics& dyn, int cur, int hit) {
  std::vector<int> cycle{hit};
  for (int j = hit; j != cur;) {
    j = dyn.sigma[j];
    if (j < 0) return false;
    cycle.push_back(j);
    if (cycle.size() > dyn.marked.size()) return false;
  }
  Complex lambda = 1.0;
  for (int j : cycle) {
    if (dyn.marked[j].is_infinity()) return false;
    lambda *= R.planar_derivative(dyn.marked[j].finite());
  }
  return lambda != 0.0 && std::abs(lambda) < 1.0;
}

}  // namespace

MarkedDynamics build_perturbed_dynamics(const RationalMap& R, const std::vector<TargetValue>& targets,
                                        const PerturbOptions& opt) {
  if (!R.is_polynomial()) throw PreconditionError("polynomial mode requires a polynomial");
  const int d = R.degree();
  const Poly& P = R.numerator();
  if (std::abs(P.c[d] - 1.0) > 1e-12 || std::abs(P.c[d - 1]) > 1e-12)
    throw PreconditionError("polynomial must be monic and centred");

  MarkedDynamics dyn;
  dyn.degree = d;
  auto find = [&dyn](const SpherePoint& z) {
    for (std::size_t i = 0; i < dyn.marked.size(); ++i)
      if (chordal_distance(dyn.marked[i], z) < kMerge) return static_cast<int>(i);
    return -1;
  };
  auto add = [&](const SpherePoint& z) {
    const int i = find(z);
    if (i >= 0) return i;
    dyn.marked.push_back(z);
    dyn.sigma.push_back(-1);
    return static_cast<int>(dyn.marked.size()) - 1;
  };
  auto link = [&dyn](int from, int to) {
    if (dyn.sigma[from] >= 0 && dyn.sigma[from] != to)
      throw NumericError("collision", "marked point " + std::to_string(from) + " has two images");
    dyn.sigma[from] = to;
  };

  const auto& crit = R.critical_points();
  std::map<int, int> crit_index;
  std::vector<bool> julia_point(crit.size(), false);
  for (std::size_t i = 0; i < crit.size(); ++i) {
    if (crit[i].point.is_infinity()) continue;
    crit_index[static_cast<int>(i)] = add(crit[i].point);
    dyn.critical.push_back({crit_index[static_cast<int>(i)], crit[i].local_degree});
  }
  const auto jb = R.julia_blocks();
  std::map<int, const TargetValue*> by_block;
  for (const auto& t : targets) by_block[t.block] = &t;
  for (int b : jb)
    for (int m : R.critical_blocks()[b].members) julia_point[m] = true;
  std::vector<bool> rerouted(crit.size(), false);
  for (int b : jb) {
    const auto& blk = R.critical_blocks()[b];
    auto it = by_block.find(blk.id);
    if (it == by_block.end()) continue;
    const TargetValue& t = *it->second;
    if (t.orbit.empty()) throw PreconditionError("target without orbit certificate");
    if (t.preperiod < 0 || t.period < 1 || t.preperiod + t.period != static_cast<int>(t.orbit.size()))
      throw PreconditionError("target orbit does not match its preperiod and period");
    std::vector<int> idx;
    for (const auto& z : t.orbit) {
      if (z.is_infinity()) throw PreconditionError("target orbit reaches infinity");
      const int i = find(z);
      for (const auto& [ci, mi] : crit_index)
        if (i == mi && julia_point[ci]) throw NumericError("collision", "target orbit meets a critical point");
      idx.push_back(add(z));
    }
    link(crit_index[blk.tail], idx.front());
    rerouted[blk.tail] = true;
    for (std::size_t k = 0; k + 1 < idx.size(); ++k) link(idx[k], idx[k + 1]);
    link(idx.back(), idx[t.preperiod]);
  }
  // Remaining critical orbits are followed under R until they close up.
  for (const auto& [ci, mi] : crit_index) {
    if (rerouted[ci]) continue;
    int cur = mi;
    SpherePoint z = crit[ci].point;
    for (int step = 0; step < opt.max_orbit && dyn.sigma[cur] < 0; ++step) {
      z = R(z);
      if (z.is_infinity()) throw PreconditionError("critical orbit escapes; truncate or choose another map");
      const int existing = find(z);
      const int next = add(z);
      if (existing >= 0 && closes_on_attracting_cycle(R, dyn, cur, existing)) break;
      link(cur, next);
      if (existing >= 0) break;
      cur = next;
    }
    if (dyn.sigma[cur] < 0) {
      if (!opt.allow_truncation) throw PreconditionError("critical orbit is not finite within max_orbit");
      dyn.sigma[cur] = cur;
      dyn.truncated.push_back(cur);
    }
  }
  const int inf = add(SpherePoint::infinity());
  dyn.sigma[inf] = inf;
  dyn.critical.push_back({inf, d});
  for (int s : dyn.sigma)
    if (s < 0) throw NumericError("numeric-failure", "marked set is not closed");
  dyn.validate();
  return dyn;
}

ThurstonState initial_state(const MarkedDynamics& dyn, const std::vector<Complex>& positions) {
  dyn.validate();
  if (positions.size() != dyn.marked.size()) throw PreconditionError("one position per marked point");
  const int inf = dyn.infinity_index();
  ThurstonState s;
  s.positions = positions;
  s.positions[inf] = 0.0;
  for (std::size_t i = 0; i < positions.size(); ++i)
    if (static_cast<int>(i) != inf && !std::isfinite(std::abs(positions[i])))
      throw PreconditionError("finite marked points need finite positions");
  check_distinct(s.positions, inf);
  // Seed: Q' = d prod (z - x_c)^(mu - 1), integrated.
  const int d = dyn.degree;
  Poly dq{{Complex(static_cast<double>(d))}};
  for (const auto& c : finite_critical(dyn)) dq = dq * power(Poly{{-s.positions[c.index], Complex(1.0)}}, c.mu - 1);
  std::vector<Complex> seed(d + 1, 0.0);
  for (int k = 0; k < d && k < static_cast<int>(dq.c.size()); ++k) seed[k + 1] = dq.c[k] / static_cast<double>(k + 1);
  seed[d] = 1.0;
  seed[d - 1] = 0.0;
  s.poly = solve_q(dyn, s.positions, seed).poly;
  return s;
}

ThurstonState thurston_step(const ThurstonState& state, const MarkedDynamics& dyn) {
  const int inf = dyn.infinity_index();
  const int n = static_cast<int>(dyn.marked.size());
  if (static_cast<int>(state.positions.size()) != n) throw PreconditionError("state does not match the dynamics");
  check_distinct(state.positions, inf);
  const Solved q = solve_q(dyn, state.positions, state.poly);
  const int d = dyn.degree;
  ThurstonState next;
  next.poly = q.poly;
  next.poly[d] = 1.0;
  next.poly[d - 1] = 0.0;
  next.positions = state.positions;
  next.k = state.k + 1;
  for (int i = 0; i < n; ++i) {
    if (i == inf) continue;
    if (auto it = q.y.find(i); it != q.y.end()) {
      next.positions[i] = it->second;
      continue;
    }
    const Complex w = state.positions[dyn.sigma[i]];
    std::vector<Complex> roots;
    if (d == 2) {
      const Complex r = std::sqrt(w - next.poly[0]);
      roots = {r, -r};
    } else {
      Poly f{next.poly};
      f.c[0] -= w;
      roots = aberth_roots(f);
    }
    const Complex x = state.positions[i];
    std::sort(roots.begin(), roots.end(), [x](Complex a, Complex b) { return std::abs(a - x) < std::abs(b - x); });
    if (roots.size() > 1 && std::abs(roots[1] - roots[0]) > 1e-8 * (1.0 + std::abs(roots[0])) &&
        std::abs(std::abs(roots[1] - x) - std::abs(roots[0] - x)) < 1e-12 * (1.0 + std::abs(x)))
      throw NumericError("ambiguous-pullback", "two preimages of marked point " + std::to_string(dyn.sigma[i]) +
                                                   " are equidistant from marked point " + std::to_string(i));
    next.positions[i] = roots[0];
  }
  check_distinct(next.positions, inf);
  for (int i = 0; i < n; ++i)
    if (i != inf) next.step_norm = std::max(next.step_norm, std::abs(next.positions[i] - state.positions[i]));
  return next;
}

ThurstonRun run_thurston(const MarkedDynamics& dyn, const std::vector<Complex>& init, double tol, int max_iter) {
  if (!(tol >= 0.0)) throw PreconditionError("tol must be >= 0");
  if (max_iter < 1) throw PreconditionError("max_iter must be >= 1");
  if (!dyn.truncated.empty()) throw PreconditionError("truncated combinatorics cannot be iterated");
  ThurstonRun run;
  run.state = initial_state(dyn, init);
  for (int k = 0; k < max_iter; ++k) {
    run.state = thurston_step(run.state, dyn);
    run.history.push_back(run.state.step_norm);
    run.iterations = k + 1;
    if (run.state.step_norm < tol) {
      run.converged = true;
      break;
    }
  }
  const int inf = dyn.infinity_index();
  for (std::size_t i = 0; i < dyn.marked.size(); ++i) {
    if (static_cast<int>(i) == inf) continue;
    run.residual = std::max(
        run.residual, std::abs(eval(run.state.poly, run.state.positions[i]) - run.state.positions[dyn.sigma[i]]));
  }
  run.coefficients = run.state.poly;
  run.monotone_from = static_cast<int>(run.history.size());
  while (run.monotone_from > 0 &&
         (run.monotone_from == static_cast<int>(run.history.size()) ||
          run.history[run.monotone_from - 1] >= run.history[run.monotone_from]))
    --run.monotone_from;
  try {
    run.Q = RationalMap::from_coefficients(run.state.poly, {1.0});
  } catch (const std::exception&) {
    run.Q.reset();
  }
  return run;
}

NonrecurrenceReport verify_nonrecurrent(const RationalMap& Q, int depth, double margin) {
  if (depth < 1) throw PreconditionError("depth must be >= 1");
  NonrecurrenceReport rep;
  rep.depth = depth;
  rep.min_distance = std::numeric_limits<double>::infinity();
  const auto& crit = Q.critical_points();
  for (std::size_t i = 0; i < crit.size(); ++i) {
    if (crit[i].in_julia != JuliaStatus::Yes) continue;
    NonrecurrenceRow row;
    row.critical_index = static_cast<int>(i);
    row.min_distance = std::numeric_limits<double>::infinity();
    SpherePoint z = crit[i].point;
    for (int n = 1; n <= depth; ++n) {
      z = Q(z);
      for (const auto& c : crit) {
        if (c.in_julia != JuliaStatus::Yes) continue;
        const double dist = chordal_distance(z, c.point);
        if (dist < row.min_distance) {
          row.min_distance = dist;
          row.closest_step = n;
        }
      }
    }
    rep.min_distance = std::min(rep.min_distance, row.min_distance);
    if (row.min_distance < margin) rep.verdict = Verdict::Fails;
    rep.rows.push_back(row);
  }
  return rep;
}

ConnectingRun connecting_lemma(const RationalMap& R, double delta, const ConnectingOptions& opt) {
  ConnectingRun out;
  out.targets = choose_target_values(R, delta, opt.depth, opt.targets);
  out.dynamics = build_perturbed_dynamics(R, out.targets);
  // h_0 is the identity: start from the unperturbed positions.
  std::vector<Complex> init;
  for (const auto& z : out.dynamics.marked) init.push_back(z.is_infinity() ? Complex(0.0) : z.finite());
  out.run = run_thurston(out.dynamics, init, opt.tol, opt.max_iter);
  if (out.run.converged && out.run.Q)
    out.nonrecurrence = verify_nonrecurrent(*out.run.Q, opt.verify_depth, opt.margin);
  else
    out.nonrecurrence.verdict = Verdict::Undetermined;
  CheckOptions co;
  co.depth = opt.bc_depth;
  out.bc = check_bc(R, delta, 2.0 * delta, co);
  return out;
}

}  // namespace bctk
