#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bctk/orbit.hpp"

using namespace bctk;

namespace {
SpherePoint P(double re, double im = 0.0) { return SpherePoint::from_complex({re, im}); }

const ExposureReport* find_value(const std::vector<ExposureReport>& r, Complex v) {
  for (const auto& e : r)
    if (!e.value.is_infinity() && std::abs(e.value.finite() - v) < 1e-9) return &e;
  return nullptr;
}
}  // namespace

TEST_CASE("orbit record identities") {
  for (Complex c : {Complex(-2.0), Complex(0.0, 1.0), Complex(-0.75, 0.1)}) {
    auto R = RationalMap::quadratic(c);
    auto rec = orbit_record(R, P(0.3, 0.2), 40);
    REQUIRE(rec.points.size() == 41);
    REQUIRE(rec.log_derivatives.size() == 41);
    double s = 0.0;
    for (int k = 0; k < 40; ++k) {
      CHECK(chordal_distance(R(rec.points[k]), rec.points[k + 1]) <= 1e-12);
      CHECK(rec.log_derivatives[k] == s);
      s += std::log(R.spherical_derivative(rec.points[k]));
    }
    CHECK(rec.log_derivatives[40] == s);
  }
  CHECK(orbit_record(RationalMap::quadratic(1.0), P(0.0), 30).fate == OrbitFate::Escapes);
  CHECK(orbit_record(RationalMap::quadratic(-0.1), P(0.0), 200).fate == OrbitFate::Attracted);
  CHECK(orbit_record(RationalMap::quadratic(-2.0), P(0.0), 30).fate == OrbitFate::Bounded);
}

TEST_CASE("exposed critical values") {
  auto chebyshev = exposed_critical_values(RationalMap::quadratic(-2.0), 50);
  const auto* e = find_value(chebyshev, -2.0);
  REQUIRE(e);
  CHECK(e->exposed);
  CHECK(e->in_julia);
  CHECK(e->min_distance > 0.8);

  auto square = exposed_critical_values(RationalMap::quadratic(0.0), 50);
  REQUIRE(find_value(square, 0.0));
  CHECK(!find_value(square, 0.0)->exposed);

  auto rabbitish = exposed_critical_values(RationalMap::quadratic({0.0, 1.0}), 50);
  REQUIRE(find_value(rabbitish, {0.0, 1.0}));
  CHECK(find_value(rabbitish, {0.0, 1.0})->exposed);
}

TEST_CASE("Collet-Eckmann growth rates") {
  auto cheb = check_collet_eckmann_at(RationalMap::quadratic(-2.0), P(-2.0), 200);
  CHECK(std::abs(cheb.lambda_hat - std::log(4.0)) < 1e-6);
  CHECK(cheb.verdict == Verdict::Holds);

  auto dendrite = check_collet_eckmann_at(RationalMap::quadratic({0.0, 1.0}), P(0.0, 1.0), 200);
  CHECK(std::abs(dendrite.lambda_hat - 0.5 * std::log(4.0 * std::sqrt(2.0))) < 1e-4);
  CHECK(dendrite.verdict == Verdict::Holds);

  // z + z^2: critical value -1/4 creeps into the parabolic point 0.
  auto para = RationalMap::from_coefficients({0.0, 1.0, 1.0}, {1.0});
  auto rep = check_collet_eckmann_at(para, P(-0.25), 400);
  CHECK(rep.verdict == Verdict::Fails);
  CHECK(std::abs(rep.lambda_hat) < 0.05);
  CHECK(rep.parabolic);

  CHECK_THROWS_AS(check_collet_eckmann_at(RationalMap::quadratic(0.0), P(0.0), 20), NumericError);

  auto all = check_collet_eckmann(RationalMap::quadratic(-2.0), 100);
  CHECK(julia_verdict(all) == Verdict::Holds);
  auto sq = check_collet_eckmann(RationalMap::quadratic(0.0), 100);
  for (const auto& r : sq) CHECK(!r.exposed);
}

TEST_CASE("summability partial sums") {
  auto R = RationalMap::quadratic(-2.0);
  auto one = check_summability_at(R, P(-2.0), 1.0, 30);
  CHECK(std::abs(one.partial_sum - 1.0 / 3.0) < 1e-12);
  CHECK(one.verdict == Verdict::Holds);
  auto half = check_summability_at(R, P(-2.0), 0.5, 40);
  CHECK(std::abs(half.partial_sum - 1.0) < 1e-10);
  auto zero = check_summability_at(R, P(-2.0), 1.0, 0);
  CHECK(zero.partial_sum == doctest::Approx(0.25));
  CHECK(zero.verdict == Verdict::Undetermined);
  CHECK_THROWS_AS(check_summability_at(R, P(-2.0), 0.0, 10), PreconditionError);
}

TEST_CASE("summability verdict is monotone in beta") {
  const std::vector<double> betas{0.1, 0.25, 0.5, 0.75, 1.0};
  for (Complex c : {Complex(-2.0), Complex(0.0, 1.0), Complex(-0.1), Complex(-1.543689, 0.0)}) {
    auto R = RationalMap::quadratic(c);
    const SpherePoint v = P(c.real(), c.imag());
    bool seen_holds = false;
    for (double b : betas) {
      auto rep = check_summability_at(R, v, b, 60);
      if (seen_holds) CHECK(rep.verdict == Verdict::Holds);
      seen_holds = seen_holds || rep.verdict == Verdict::Holds;
    }
  }
  auto attracted = check_summability_at(RationalMap::quadratic(-0.1), P(-0.1), 1.0, 60);
  CHECK(attracted.verdict == Verdict::Fails);
}

TEST_CASE("slow recurrence fit") {
  auto R = RationalMap::quadratic(-2.0);
  auto fit = slow_recurrence_fit(R, P(-2.0), 6);
  CHECK(!fit.degenerate);
  CHECK(fit.complete);
  REQUIRE(fit.min_distance.size() == 6);
  CHECK(fit.theta >= 1.0 / 16.0);
  CHECK(fit.theta < 1.0);
  for (std::size_t k = 0; k < fit.min_distance.size(); ++k)
    CHECK(fit.min_distance[k] >= fit.C1 * std::pow(fit.theta, k + 1.0) * (1 - 1e-12));
  CHECK_THROWS_AS(slow_recurrence_fit(R, P(-2.0), 0), PreconditionError);
  CHECK(slow_recurrence_fit(RationalMap::quadratic(0.0), P(0.0), 3).degenerate);
  auto partial = slow_recurrence_fit(R, P(-2.0), 10, 50);
  CHECK(!partial.complete);
}
