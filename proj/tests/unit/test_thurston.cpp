#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bctk/poly.hpp"
#include "bctk/thurston.hpp"

using namespace bctk;

namespace {
SpherePoint P(double re, double im = 0.0) { return SpherePoint::from_complex({re, im}); }

Complex rabbit_c() {
  for (const auto& r : aberth_roots(Poly{{1.0, 1.0, 2.0, 1.0}}))
    if (r.imag() > 0.1) return r;
  return 0.0;
}

MarkedDynamics rabbit_dynamics() {
  const Complex c = rabbit_c();
  MarkedDynamics dyn;
  dyn.degree = 2;
  dyn.marked = {P(0.0), SpherePoint::from_complex(c), SpherePoint::from_complex(c * c + c), SpherePoint::infinity()};
  dyn.sigma = {1, 2, 0, 3};
  dyn.critical = {{0, 2}, {3, 2}};
  return dyn;
}

std::vector<Complex> true_positions(const MarkedDynamics& dyn) {
  std::vector<Complex> x;
  for (const auto& z : dyn.marked) x.push_back(z.is_infinity() ? Complex(0.0) : z.finite());
  return x;
}

TargetValue identity_target(const RationalMap& R, int block, int preperiod, int period) {
  const auto& blk = R.critical_blocks()[block];
  TargetValue t;
  t.block = blk.id;
  t.v = blk.value;
  t.preperiod = preperiod;
  t.period = period;
  t.orbit = orbit(R, blk.value, preperiod + period - 1);
  return t;
}
}  // namespace

TEST_CASE("repelling periodic points of the Chebyshev map") {
  const RationalMap R = RationalMap::quadratic(-2.0);
  const auto pts = repelling_periodic_points(R, 4);
  // Fix(R^4) has 16 points and Fix(R^3) adds 6 of exact period 3.
  CHECK(pts.size() == 22);
  for (const auto& p : pts) {
    const Complex z = p.z.finite();
    CHECK(std::abs(z.imag()) < 1e-9);
    const double theta = std::acos(std::clamp(z.real() / 2.0, -1.0, 1.0));
    // 2 cos(theta) is p-periodic iff 2^p theta = +-theta mod 2 pi.
    const double a = (std::pow(2.0, p.period) - 1.0) * theta / (2.0 * std::numbers::pi);
    const double b = (std::pow(2.0, p.period) + 1.0) * theta / (2.0 * std::numbers::pi);
    CHECK(std::min(std::abs(a - std::round(a)), std::abs(b - std::round(b))) < 1e-7);
    CHECK(std::abs(p.multiplier) > 1.0);
  }
  CHECK(repelling_periodic_points(R, 6).size() == 106);
  CHECK(repelling_periodic_points(RationalMap::quadratic(0.0), 2).size() == 3);
}

TEST_CASE("target values") {
  const RationalMap cheb = RationalMap::quadratic(-2.0);
  const auto t = choose_target_values(cheb, 0.05, 8);
  REQUIRE(t.size() == 1);
  CHECK(t[0].distance < 0.05);
  CHECK(chordal_distance(t[0].v, P(-2.0)) == doctest::Approx(t[0].distance));
  // Backward orbits of the fixed point 2 are 2 cos(2 pi k / 2^m).
  const double theta = std::acos(t[0].v.finite().real() / 2.0) / (2.0 * std::numbers::pi);
  const double scaled = theta * std::pow(2.0, t[0].preperiod);
  CHECK(std::abs(scaled - std::round(scaled)) < 1e-9);
  REQUIRE(static_cast<int>(t[0].orbit.size()) == t[0].preperiod + t[0].period);
  const Domain ball = tilde_ball(cheb, 0, 0.1, 256, 1.0).domain;
  for (std::size_t n = 1; n < t[0].orbit.size(); ++n) {
    CHECK(!ball.contains(t[0].orbit[n]));
    CHECK(chordal_distance(cheb(t[0].orbit[n - 1]), t[0].orbit[n]) < 1e-9);
  }
  CHECK(chordal_distance(cheb(t[0].orbit.back()), t[0].orbit[t[0].preperiod]) < 1e-9);
  CHECK(t[0].clearance > 0.0);

  const RationalMap dendrite = RationalMap::quadratic({0.0, 1.0});
  const auto u = choose_target_values(dendrite, 0.05, 6);
  REQUIRE(u.size() == 1);
  CHECK(std::abs(u[0].v.finite() - Complex(0.0, 1.0)) < 1e-12);
  CHECK(u[0].preperiod == 1);
  CHECK(u[0].period == 2);

  CHECK_THROWS_AS(choose_target_values(cheb, 0.0, 8), PreconditionError);
  CHECK(choose_target_values(RationalMap::quadratic(0.0), 0.05, 8).empty());
  try {
    TargetOptions o;
    o.max_period = 1;
    choose_target_values(cheb, 0.001, 0, o);
    FAIL("expected not-found");
  } catch (const NumericError& e) {
    CHECK(e.kind() == "not-found");
  }
}

TEST_CASE("perturbed combinatorics") {
  const RationalMap dendrite = RationalMap::quadratic({0.0, 1.0});
  const MarkedDynamics dyn = build_perturbed_dynamics(dendrite, {identity_target(dendrite, 0, 1, 2)});
  REQUIRE(dyn.marked.size() == 5);
  const std::vector<Complex> expect{0.0, {0.0, 1.0}, {-1.0, 1.0}, {0.0, -1.0}};
  for (std::size_t i = 0; i < expect.size(); ++i) CHECK(std::abs(dyn.marked[i].finite() - expect[i]) < 1e-12);
  CHECK(dyn.marked[4].is_infinity());
  CHECK(dyn.sigma == std::vector<int>{1, 2, 3, 2, 4});

  // Target on a 3-cycle of the Chebyshev map.
  const RationalMap cheb = RationalMap::quadratic(-2.0);
  TargetValue cyc;
  cyc.block = cheb.critical_blocks()[0].id;
  cyc.v = P(2.0 * std::cos(8.0 * std::numbers::pi / 9.0));
  cyc.period = 3;
  cyc.orbit = orbit(cheb, cyc.v, 2);
  const MarkedDynamics three = build_perturbed_dynamics(cheb, {cyc});
  CHECK(three.marked.size() == 0 + 3 + 2);
  CHECK(three.sigma[three.sigma[three.sigma[1]]] == 1);

  // z^3 - 3z: the orbit of one target runs into the other critical point.
  const RationalMap cubic = RationalMap::from_coefficients({0.0, -3.0, 0.0, 1.0}, {1.0});
  REQUIRE(cubic.julia_blocks().size() == 2);
  TargetValue bad;
  bad.block = cubic.critical_blocks()[cubic.julia_blocks()[0]].id;
  const Complex other = cubic.critical_points()[cubic.critical_blocks()[cubic.julia_blocks()[1]].tail].point.finite();
  bad.v = SpherePoint::from_complex(other);
  bad.preperiod = 1;
  bad.orbit = {bad.v, cubic(bad.v)};
  try {
    build_perturbed_dynamics(cubic, {bad});
    FAIL("expected a collision");
  } catch (const NumericError& e) {
    CHECK(e.kind() == "collision");
  }

  CHECK_THROWS_AS(build_perturbed_dynamics(RationalMap::quadratic(-0.5), {}), PreconditionError);
  PerturbOptions cut;
  cut.allow_truncation = true;
  const MarkedDynamics trunc = build_perturbed_dynamics(RationalMap::quadratic(-0.5), {}, cut);
  CHECK(trunc.truncated.size() == 1);
  CHECK_THROWS_AS(run_thurston(trunc, true_positions(trunc), 1e-12, 10), PreconditionError);
  CHECK_THROWS_AS(build_perturbed_dynamics(RationalMap::from_coefficients({1.0, 1.0, 1.0}, {1.0}), {}),
                  PreconditionError);
}

TEST_CASE("Thurston step") {
  const MarkedDynamics rabbit = rabbit_dynamics();
  const Complex c = rabbit_c();
  ThurstonState s = initial_state(rabbit, true_positions(rabbit));
  const ThurstonState s1 = thurston_step(s, rabbit);
  CHECK(std::abs(s1.poly[0] - c) < 1e-12);
  CHECK(s1.poly[1] == Complex(0.0));
  CHECK(s1.poly[2] == Complex(1.0));
  CHECK(s1.step_norm < 1e-12);

  const RationalMap dendrite = RationalMap::quadratic({0.0, 1.0});
  const MarkedDynamics mis = build_perturbed_dynamics(dendrite, {identity_target(dendrite, 0, 1, 2)});
  CHECK(thurston_step(initial_state(mis, true_positions(mis)), mis).step_norm < 1e-12);

  // 0.5i is equidistant from the two square roots +-1 of 0 - (-1).
  ThurstonState fold;
  fold.positions = {0.0, -1.0, {0.0, 0.5}, 0.0};
  fold.poly = {-1.0, 0.0, 1.0};
  try {
    thurston_step(fold, rabbit);
    FAIL("expected an ambiguous pull-back");
  } catch (const NumericError& e) {
    CHECK(e.kind() == "ambiguous-pullback");
  }
  ThurstonState clash = fold;
  clash.positions = {0.0, 0.3, 0.3, 0.0};
  try {
    thurston_step(clash, rabbit);
    FAIL("expected a degenerate state");
  } catch (const NumericError& e) {
    CHECK(e.kind() == "degenerate-state");
  }

  // Fixed point property for data realized by z^2 - 2.
  const RationalMap cheb = RationalMap::quadratic(-2.0);
  const MarkedDynamics cd = build_perturbed_dynamics(cheb, {identity_target(cheb, 0, 1, 1)});
  ThurstonState t = initial_state(cd, true_positions(cd));
  for (int k = 0; k < 50; ++k) {
    t = thurston_step(t, cd);
    CHECK(t.step_norm < 1e-10);
    CHECK(t.poly[1] == Complex(0.0));
    CHECK(t.poly[2] == Complex(1.0));
  }
}

TEST_CASE("Thurston iteration") {
  const MarkedDynamics rabbit = rabbit_dynamics();
  std::vector<Complex> init = true_positions(rabbit);
  init[1] += Complex(0.01, -0.01);
  init[2] += Complex(-0.01, 0.0);
  const double tol = 1e-12;
  const ThurstonRun run = run_thurston(rabbit, init, tol, 200);
  REQUIRE(run.converged);
  CHECK(run.iterations <= 200);
  const Complex c = run.coefficients[0];
  CHECK(std::abs(c * c * c + 2.0 * c * c + c + 1.0) < 1e-9);
  CHECK(run.residual <= 10 * tol);
  CHECK(run.history.size() == static_cast<std::size_t>(run.iterations));
  CHECK(run.monotone_from < run.iterations);
  REQUIRE(run.Q.has_value());
  CHECK(run.Q->degree() == 2);

  const RationalMap dendrite = RationalMap::quadratic({0.0, 1.0});
  const MarkedDynamics mis = build_perturbed_dynamics(dendrite, {identity_target(dendrite, 0, 1, 2)});
  const ThurstonRun m = run_thurston(mis, true_positions(mis), tol, 100);
  REQUIRE(m.converged);
  CHECK(std::abs(m.coefficients[0] - Complex(0.0, 1.0)) < 1e-8);
  CHECK(m.residual <= 10 * tol);

  const ThurstonRun never = run_thurston(rabbit, init, 0.0, 30);
  CHECK(!never.converged);
  CHECK(never.iterations == 30);
  CHECK(never.history.size() == 30);

  // Degree 3: z^3 - 3z with both critical values fixed, from a shifted start.
  const RationalMap cubic = RationalMap::from_coefficients({0.0, -3.0, 0.0, 1.0}, {1.0});
  std::vector<TargetValue> ts;
  for (int b : cubic.julia_blocks()) ts.push_back(identity_target(cubic, b, 0, 1));
  const MarkedDynamics cd = build_perturbed_dynamics(cubic, ts);
  CHECK(cd.marked.size() == 5);
  std::vector<Complex> x = true_positions(cd);
  const ThurstonRun exact = run_thurston(cd, x, tol, 20);
  CHECK(exact.converged);
  CHECK(exact.iterations == 1);
  for (auto& z : x) z += Complex(0.002, 0.001);
  const ThurstonRun cr = run_thurston(cd, x, tol, 200);
  REQUIRE(cr.converged);
  CHECK(std::abs(cr.coefficients[1] + 3.0) < 1e-8);
  CHECK(std::abs(cr.coefficients[0]) < 1e-8);
  CHECK(cr.coefficients[2] == Complex(0.0));
  CHECK(cr.residual <= 10 * tol);
}

TEST_CASE("nonrecurrence") {
  const auto cheb = verify_nonrecurrent(RationalMap::quadratic(-2.0), 50, 0.05);
  CHECK(cheb.verdict == Verdict::Holds);
  CHECK(cheb.min_distance == doctest::Approx(chordal_distance(P(2.0), P(0.0))).epsilon(1e-12));
  const auto sq = verify_nonrecurrent(RationalMap::quadratic(0.0), 50, 0.05);
  CHECK(sq.verdict == Verdict::Holds);
  CHECK(sq.rows.empty());

  const RationalMap dendrite = RationalMap::quadratic({0.0, 1.0});
  const MarkedDynamics mis = build_perturbed_dynamics(dendrite, {identity_target(dendrite, 0, 1, 2)});
  const ThurstonRun m = run_thurston(mis, true_positions(mis), 1e-12, 100);
  REQUIRE(m.Q.has_value());
  const auto rep = verify_nonrecurrent(*m.Q, 50, 1.0 - 1e-6);
  CHECK(rep.verdict == Verdict::Holds);
  // Planar distance of the orbit i, -1+i, -i, ... from 0 is at least 1.
  SpherePoint z = P(0.0);
  for (int n = 0; n < 50; ++n) {
    z = (*m.Q)(z);
    CHECK(std::abs(z.finite()) >= 1.0 - 1e-6);
  }
  // The first image i is at chordal distance sqrt 2 from 0.
  const auto tight = verify_nonrecurrent(*m.Q, 50, 1.5);
  CHECK(tight.verdict == Verdict::Fails);
  CHECK(tight.min_distance == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
  CHECK(tight.rows[0].closest_step == 1);
}

TEST_CASE("connecting lemma driver") {
  const RationalMap cheb = RationalMap::quadratic(-2.0);
  const ConnectingRun run = connecting_lemma(cheb, 0.05);
  REQUIRE(run.targets.size() == 1);
  CHECK(run.targets[0].distance < 0.05);
  CHECK(run.run.converged);
  CHECK(run.run.residual <= 10 * 1e-12);
  CHECK(run.nonrecurrence.verdict == Verdict::Holds);
  CHECK(run.nonrecurrence.min_distance >= 0.05);
  CHECK(run.bc.verdict == Verdict::Holds);
}
