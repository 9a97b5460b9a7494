#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "bctk/nice.hpp"

using namespace bctk;

namespace {
SpherePoint P(double re, double im = 0.0) { return SpherePoint::from_complex({re, im}); }

const RationalMap& cheb() {
  static const RationalMap R = RationalMap::quadratic(-2.0);
  return R;
}

NiceOptions fast() {
  NiceOptions o;
  o.check_bc = false;
  return o;
}

const NiceSet& nice_set() {
  static const NiceSet V = [] {
    NiceOptions o;
    o.verify_depth = 10;
    return construct_nice_set(cheb(), 0.01, 0.5, 8, o);
  }();
  return V;
}

/// Points of tilde_ball(c, delta) pulled slightly towards c in its chart.
std::vector<SpherePoint> inner_ring(const Domain& d, double shrink) {
  std::vector<SpherePoint> out;
  for (const auto& z : d.outer_plane()) out.push_back(d.chart().to_sphere(shrink * z));
  return out;
}

bool enters_union(const RationalMap& R, SpherePoint p, const NiceSet& balls, int depth) {
  for (int j = 0; j <= depth; ++j) {
    if (balls.contains(p)) return true;
    p = R(p);
  }
  return false;
}
}  // namespace

TEST_CASE("maximal invariant set membership") {
  const auto& R = cheb();
  const NiceSet V = tilde_ball_set(R, 0.01);
  CHECK(!in_KV(R, P(0.0), V, 5));
  CHECK(in_KV(R, P(2.0), V, 200));
  // R(sqrt 2) = 0 is forced into V.
  CHECK(in_KV(R, P(std::sqrt(2.0)), V, 0));
  CHECK(!in_KV(R, P(std::sqrt(2.0)), V, 1));

  const NiceSet big = tilde_ball_set(R, 0.02);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> x(-2.2, 2.2), y(-0.3, 0.3);
  int in_big = 0;
  for (int i = 0; i < 1000; ++i) {
    const SpherePoint p = P(x(rng), y(rng));
    const bool kb = in_KV(R, p, big, 12);
    in_big += kb;
    if (kb) CHECK(in_KV(R, p, V, 12));
  }
  CHECK(in_big > 0);
}

TEST_CASE("pre-nice sets") {
  const auto& R = cheb();
  const NiceSet pre = construct_pre_nice(R, 0.02, 8);
  REQUIRE(pre.domains.size() == 1);
  const Domain& Vt = pre.domains.begin()->second;
  const Domain small = tilde_ball(R, 0, 0.02, 512).domain;
  const Domain large = tilde_ball(R, 0, 0.04, 512).domain;
  for (const auto& p : inner_ring(small, 0.999)) CHECK(Vt.contains(p));
  for (const auto& p : Vt.outer()) CHECK(large.contains(p));
  CHECK(pre.diagnostics.at("absorbed") > 0);

  // Every point of the region enters the balls within the depth.
  const NiceSet balls = tilde_ball_set(R, 0.02);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-0.4, 0.4);
  int tested = 0;
  for (int i = 0; i < 4000; ++i) {
    const SpherePoint p = P(u(rng), u(rng));
    if (!Vt.contains(p)) continue;
    ++tested;
    CHECK(enters_union(R, p, balls, 8));
  }
  CHECK(tested > 100);

  const NiceSet zero = construct_pre_nice(R, 0.02, 0);
  const Domain& z0 = zero.domains.begin()->second;
  REQUIRE(z0.outer().size() == small.outer().size());
  double worst = 0.0;
  for (const auto& p : z0.outer()) {
    double best = 1.0;
    for (const auto& q : small.outer()) best = std::min(best, chordal_distance(p, q));
    worst = std::max(worst, best);
  }
  CHECK(worst < 1e-12);

  // Backward contraction fails at (0.2, 0.4) for this map.
  try {
    construct_pre_nice(R, 0.2, 8);
    FAIL("expected a construction failure");
  } catch (const ConstructionError& e) {
    CHECK(e.stage() == "pre-nice");
    CHECK(e.evidence().has_value());
  }
  CHECK(construct_pre_nice(RationalMap::quadratic(0.0), 0.02, 8).empty());
  CHECK_THROWS_AS(construct_pre_nice(R, 0.0, 8), PreconditionError);
}

TEST_CASE("neighbourhoods of critical values") {
  const auto& R = cheb();
  const NiceSet base = construct_pre_nice(R, 0.05, 8, fast());
  const UVResult uv = construct_u_v(R, P(-2.0), 0.02, base, 8);
  CHECK(uv.eta_bound == 2.0);
  CHECK(uv.eta_measured <= 2.0);
  for (const auto& p : uv.U.outer()) {
    CHECK(chordal_distance(p, P(-2.0)) <= 2.0 * 0.02);
    CHECK(chordal_distance(p, P(-2.0)) >= 0.02 * (1.0 - 1e-3));
  }

  const NiceSet base0 = construct_pre_nice(R, 0.05, 0, fast());
  const UVResult plain = construct_u_v(R, P(-2.0), 0.02, base0, 0);
  CHECK(plain.absorbed == 0);
  CHECK(plain.eta_measured == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(plain.U.outer().size() == 512);
  CHECK_THROWS_AS(construct_u_v(R, P(-2.0), 0.0, base, 8), PreconditionError);
}

TEST_CASE("nice set construction") {
  const auto& R = cheb();
  const NiceSet& V = nice_set();
  REQUIRE(V.domains.size() == 1);
  REQUIRE(V.verification.has_value());
  const NiceReport& rep = *V.verification;
  CHECK(rep.verdict == Verdict::Holds);
  CHECK(rep.overlaps == 0);
  CHECK(rep.boundary_margin > 1e-6);
  CHECK(rep.pullbacks == 2046);
  CHECK(V.diagnostics.at("criterion_violations") == 0);

  const Domain& Vc = V.domains.begin()->second;
  const double eta = V.params.eta;
  CHECK(eta == doctest::Approx(1.0 + std::sqrt(0.04 / 0.5)));
  for (const auto& p : inner_ring(tilde_ball(R, 0, 0.01, 512).domain, 0.999)) CHECK(Vc.contains(p));
  const Domain outer = tilde_ball(R, 0, eta * 0.01 * 1.001, 512).domain;
  for (const auto& p : Vc.outer()) CHECK(outer.contains(p));

  CHECK(construct_nice_set(RationalMap::quadratic(0.0), 0.01, 0.5, 8).empty());
  CHECK_THROWS_AS(construct_nice_set(R, 0.01, 0.32, 8), PreconditionError);
}

TEST_CASE("nice nests") {
  const auto& R = cheb();
  const NiceNest nest = construct_nice_nest(R, 0.04, 0.5, 1.5, 3, 8, fast());
  CHECK(nest.complete);
  REQUIRE(nest.levels.size() == 6);
  for (std::size_t j = 0; j < nest.levels.size(); ++j) {
    const double s = std::pow(0.5, j + 1) * 0.04;
    const Domain& Vj = nest.levels[j].domains.begin()->second;
    for (const auto& p : inner_ring(tilde_ball(R, 0, s, 512).domain, 0.999)) CHECK(Vj.contains(p));
    const Domain outer = tilde_ball(R, 0, 1.5 * s, 512).domain;
    for (const auto& p : Vj.outer()) CHECK(outer.contains(p));
  }
  CHECK(nest.levels[4].diagnostics.at("base_level") == 1);
  const NestReport rep = verify_nest(R, nest.levels, 3, 8);
  CHECK(rep.verdict == Verdict::Holds);
  CHECK(rep.nested);
  CHECK(rep.overlaps == 0);
  for (const auto& l : rep.levels) CHECK(l.overlaps == 0);

  const NiceNest single = construct_nice_nest(R, 0.04, 0.5, 1.5, 0, 6, fast());
  CHECK(single.levels.size() == 1);
  CHECK(verify_nest(R, single.levels, 0, 6).verdict == Verdict::Holds);
  CHECK_THROWS_AS(construct_nice_nest(R, 0.04, 0.6, 1.8, 3, 8), PreconditionError);
}

TEST_CASE("nice verification failures") {
  const auto& R = cheb();
  NiceSet two;
  two.domains.emplace(0, Domain::disk(P(0.0), 0.1, 128));
  two.domains.emplace(1, Domain::disk(P(0.05), 0.1, 128));
  const NiceReport overlap = verify_nice(R, two, 4);
  CHECK(!overlap.closures_disjoint);
  CHECK(overlap.verdict == Verdict::Fails);

  // Orbit search over raw ball radii for a boundary point that comes back.
  bool found = false;
  for (double d : {0.015, 0.02, 0.03}) {
    const NiceSet V = tilde_ball_set(R, d);
    const NiceReport rep = verify_nice(R, V, 8);
    if (!rep.boundary_witness) continue;
    found = true;
    CHECK(rep.verdict == Verdict::Fails);
    const auto orb = orbit(R, rep.boundary_witness->z, rep.boundary_witness->n);
    CHECK(V.contains(orb.back()));
    break;
  }
  CHECK(found);
}

TEST_CASE("first entry map") {
  const auto& R = cheb();
  const NiceSet& V = nice_set();
  const int b = V.domains.begin()->first;
  FirstEntry fe = first_entry_map(R, P(0.01), V, 10);
  CHECK(!fe.stays_out);
  CHECK(fe.m == 0);
  CHECK(fe.block == b);
  const SpherePoint p = P(std::sqrt(2.05));
  REQUIRE(!V.contains(p));
  fe = first_entry_map(R, p, V, 10, true);
  CHECK(fe.m == 1);
  CHECK(fe.block == b);
  CHECK(fe.certified);
  CHECK(first_entry_map(R, P(2.0), V, 50).stays_out);

  // Same entry times at twice the polyline resolution.
  NiceOptions hi = fast();
  hi.resolution = 1024;
  const NiceSet V2 = construct_nice_set(R, 0.01, 0.5, 8, hi);
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> x(-2.0, 2.0), y(-0.05, 0.05);
  int entered = 0;
  for (int i = 0; i < 300; ++i) {
    const SpherePoint q = P(x(rng), y(rng));
    const FirstEntry a = first_entry_map(R, q, V, 15);
    const FirstEntry c = first_entry_map(R, q, V2, 15);
    CHECK(a.stays_out == c.stays_out);
    CHECK(a.m == c.m);
    entered += !a.stays_out;
  }
  CHECK(entered > 30);
}

TEST_CASE("area ratio") {
  const auto& R = cheb();
  const NiceSet outer = tilde_ball_set(R, 0.02);
  const NiceSet inner = tilde_ball_set(R, 0.01);
  const AreaReport same = area_ratio(R, outer, outer, 5, 500, 1);
  CHECK(same.xi == 1.0);
  CHECK(same.half_width == 0.0);
  CHECK_THROWS_AS(area_ratio(R, outer, inner, 5, 0, 1), PreconditionError);

  // Depth 0: the spherical area ratio of the two balls, by quadrature.
  double a_in = 0.0, a_out = 0.0;
  const int n = 1200;
  const double h = 1.0 / n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Complex z(-0.5 + (i + 0.5) * h, -0.5 + (j + 0.5) * h);
      const double w = 4.0 / std::pow(1.0 + std::norm(z), 2);
      const double d = chordal_distance(z * z - 2.0, Complex(-2.0));
      if (d < 0.02) a_out += w;
      if (d < 0.01) a_in += w;
    }
  const AreaReport rep = area_ratio(R, outer, inner, 0, 20000, 9);
  CHECK(std::abs(rep.xi - a_in / a_out) < 3.0 * rep.half_width + 0.005);
  CHECK(rep.half_width == doctest::Approx(1.96 * std::sqrt(rep.xi * (1 - rep.xi) / 20000.0)));

  const AreaReport again = area_ratio(R, outer, inner, 0, 20000, 9, 1.0, 3);
  CHECK(again.xi == rep.xi);
  const AreaReport deep = area_ratio(R, outer, inner, 20, 2000, 4, 1.2);
  CHECK(deep.xi >= 0.0);
  CHECK(deep.xi <= 1.0);
  CHECK(deep.psi == 1.0 - deep.xi);
  CHECK(deep.xi_tilde >= deep.xi);
  CHECK(deep.xi_tilde / (1.2 * 1.2) <= deep.xi + 1e-15);
}
