#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "bctk/shrinking.hpp"

using namespace bctk;

namespace {
SpherePoint P(double re, double im = 0.0) { return SpherePoint::from_complex({re, im}); }
}  // namespace

TEST_CASE("shrinking schedule calibration") {
  SUBCASE("single term") {
    auto s = shrinking_schedule({{2.0}}, 1.0);
    CHECK(s.d[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(s.D[1] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(s.D[0] == 1.0);
  }
  SUBCASE("geometric weights") {
    std::vector<double> der;
    for (int j = 0; j < 20; ++j) der.push_back(std::pow(4.0, j + 1));
    auto s = shrinking_schedule({der}, 1.0);
    CHECK(s.residual <= 1e-9);
    for (int j = 1; j < 20; ++j) {
      CHECK(s.d[j] / s.d[j - 1] == doctest::Approx(0.25).epsilon(1e-12));
      CHECK(s.D[j] < s.D[j - 1]);
      CHECK(s.D[j] == s.D[j - 1] * (1.0 - s.d[j - 1]));
    }
    CHECK(s.D.back() > 0.5);
  }
  SUBCASE("no decay is infeasible") {
    CHECK_THROWS_AS(shrinking_schedule({std::vector<double>(30, 1.0)}, 1.0), NumericError);
  }
  SUBCASE("max over values") {
    auto s = shrinking_schedule({{4.0, 16.0}, {2.0, 32.0}}, 1.0);
    CHECK(s.d[0] / s.d[1] == doctest::Approx(0.5 / (1.0 / 16.0)));
  }
}

TEST_CASE("Koebe pair inequality") {
  auto id = mobius_disk_map(0.0, 0.0);
  CHECK(koebe_pair_residual(id, 0.3) == doctest::Approx(0.3 - 2.0 * 0.3 / 0.7));
  CHECK(koebe_pair_residual(id, 0.0) == 0.0);

  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = -1e300, worst_printed = -1e300;
  for (int i = 0; i < 100; ++i) {
    const Complex a = std::polar(0.95 * std::sqrt(u(rng)), 6.283185307179586 * u(rng));
    auto m = mobius_disk_map(a, 6.283185307179586 * u(rng));
    for (int j = 0; j < 20; ++j) {
      const Complex v = std::polar(0.98 * std::sqrt(u(rng)), 6.283185307179586 * u(rng));
      worst = std::max(worst, koebe_pair_residual(m, v));
      worst_printed = std::max(worst_printed, koebe_pair_residual(m, v, KoebeForm::Printed));
    }
  }
  CHECK(worst <= 1e-8);
  // |1 - f(v)| can exceed 1 - |f(v)|; the printed bound is then too small.
  CHECK(worst_printed > 0.0);

  // Univalent branch of z^2 - 2 over |w - 1| < 0.5 near sqrt(3).
  auto R = RationalMap::quadratic(-2.0);
  auto f = pullback_disk_map(R, 1, 1.0, 0.5, std::sqrt(3.0));
  double worst_branch = -1e300;
  for (int j = 0; j < 200; ++j) {
    const Complex w = 1.0 + std::polar(0.5 * 0.95 * u(rng), 6.283185307179586 * u(rng));
    const Complex v = std::sqrt(w + 2.0);
    worst_branch = std::max(worst_branch, koebe_pair_residual(f, v));
  }
  CHECK(worst_branch <= 1e-8);
  CHECK_THROWS_AS(pullback_disk_map(R, 1, 1.0, 0.5, 1.0), NumericError);
}

TEST_CASE("univalent times") {
  auto cheb = RationalMap::quadratic(-2.0);
  const int c0 = 0;
  REQUIRE(cheb.critical_points()[c0].point.finite() == Complex(0.0));
  CHECK(univalent_times(cheb, P(-2.0), c0, 30).empty());
  CHECK(univalent_times(cheb, P(-2.0), c0, 0).empty());

  auto R = RationalMap::quadratic({0.0, 1.0});
  REQUIRE(R.critical_points()[0].point.finite() == Complex(0.0));
  CHECK(univalent_times(R, P(0.0, 1.0), 0, 12).empty());
  // Widening r_K brings in the times k = 2, 4, ... where R^k(i) = -i, but
  // tilde_ball(0, r) is symmetric under z -> -z, so with -i on its boundary
  // it also reaches i = R(0): the pull-back always holds the critical point.
  UnivalentTimeOptions wide;
  wide.r_K = 1.5;
  for (const auto& t : univalent_times(R, P(0.0, 1.0), 0, 8, wide)) CHECK(!t.certified);

  auto R2 = RationalMap::quadratic(-1.8);
  UnivalentTimeOptions opt;
  opt.r_K = 0.3;
  auto times = univalent_times(R2, P(-1.8), 0, 20, opt);
  REQUIRE(!times.empty());
  for (std::size_t i = 1; i < times.size(); ++i) CHECK(times[i].k > times[i - 1].k);
  for (const auto& t : times) {
    REQUIRE(t.certified);
    // xi is a k-th preimage of c, close to v.
    auto orb = orbit(R2, t.xi, t.k);
    CHECK(std::abs(orb.back().finite()) < 1e-8);
    CHECK(t.dist_xi_v < t.radius);
    auto vorb = orbit(R2, P(-1.8), t.k + 1);
    CHECK(t.radius == doctest::Approx(chordal_distance(vorb.back(), P(-1.8))));
  }
}

TEST_CASE("rho evaluators") {
  RhoConstants K;
  K.beta = 1.0;
  auto empty = rho_evaluators({}, K, {0.1, 0.01}, 10);
  for (const auto& r : empty) {
    CHECK(r.rho_empty);
    CHECK(std::isinf(r.rho));
  }
  const double delta = 0.01;
  UnivalentTime far;
  far.k = 3;
  far.certified = true;
  far.dist_xi_v = 2 * delta;
  far.derivative = 4.0;
  CHECK(rho_evaluators({far}, K, {delta}, 10)[0].rho == doctest::Approx(2.0));
  UnivalentTime near = far;
  near.dist_xi_v = delta / 2;
  near.local_degree = 2;
  auto row = rho_evaluators({near}, K, {delta}, 10)[0];
  CHECK(row.rho1 == doctest::Approx(8.0));
  CHECK(row.r0 == doctest::Approx(8.0));
  auto both = rho_evaluators({far, near}, K, {delta}, 10)[0];
  CHECK(both.r0 == doctest::Approx(std::min(0.125 * 2.0, 8.0)));
  CHECK(rho_evaluators({far}, K, {delta}, 2)[0].rho_empty);
}
