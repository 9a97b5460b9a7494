#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "bctk/rational_map.hpp"
#include "bctk/sphere.hpp"

using namespace bctk;

namespace {
SpherePoint P(double re, double im = 0.0) { return SpherePoint::from_complex({re, im}); }
const SpherePoint INF = SpherePoint::infinity();
}  // namespace

TEST_CASE("chordal distance closed forms") {
  CHECK(chordal_distance(P(0), P(1)) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(chordal_distance(P(0), INF) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(chordal_distance(P(1), P(-1)) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(chordal_distance(P(0, 1), INF) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(chordal_distance(P(3), P(3)) == 0.0);
  // Inversion z -> 1/z is an isometry.
  CHECK(chordal_distance(P(2, 1), P(-0.5, 3)) ==
        doctest::Approx(chordal_distance(SpherePoint::from_complex(1.0 / Complex(2, 1)),
                                         SpherePoint::from_complex(1.0 / Complex(-0.5, 3))))
            .epsilon(1e-14));
}

TEST_CASE("charts") {
  auto p = P(3, -4);
  CHECK(p.chart() == Chart::Inverted);
  CHECK(std::abs(p.finite() - Complex(3, -4)) < 1e-14);
  CHECK(INF.is_infinity());
  CHECK(std::isinf(INF.finite().real()));
  auto q = p.rechart();
  CHECK(q.chart() == Chart::Finite);
  CHECK(chordal_distance(q, p) < 1e-15);
  CHECK(q.rechart().value() == p.value());
  CHECK(chordal_distance(P(0.5, 0.25).antipode(), P(0.5, 0.25)) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("metric axioms on random triples") {
  std::mt19937_64 rng(7);
  std::cauchy_distribution<double> cd(0.0, 1.0);
  int bad = 0;
  for (int i = 0; i < 10000; ++i) {
    SpherePoint a = P(cd(rng), cd(rng)), b = P(cd(rng), cd(rng)), c = P(cd(rng), cd(rng));
    if (i % 97 == 0) c = INF;
    const double ab = chordal_distance(a, b), bc = chordal_distance(b, c), ac = chordal_distance(a, c);
    if (std::abs(ab - chordal_distance(b, a)) > 1e-15) ++bad;
    if (ac > ab + bc + 1e-12) ++bad;
    if (ab < 0.0 || ab > 2.0 + 1e-15) ++bad;
    const double rt = chordal_distance(a.rechart(), a);
    if (rt > 1e-15) ++bad;
  }
  CHECK(bad == 0);
}

TEST_CASE("set diameter") {
  CHECK(set_diameter({P(0), INF}) == doctest::Approx(2.0));
  CHECK(set_diameter({P(1)}) == 0.0);
  CHECK(set_diameter({}) == 0.0);
  CHECK(set_diameter({P(1), P(0, 1), P(-1)}) == doctest::Approx(2.0));
}

TEST_CASE("planar chart sends chordal balls to round disks") {
  const SpherePoint c = P(-2.0, 0.3);
  PlanarChart chart(c);
  CHECK(std::abs(chart.to_plane(c)) < 1e-15);
  CHECK(std::isinf(std::abs(chart.to_plane(c.antipode()))));
  const double r = 0.05, rho = chordal_radius_to_plane(r);
  for (int k = 0; k < 16; ++k) {
    const SpherePoint q = chart.to_sphere(std::polar(rho, 0.4 * k));
    CHECK(chordal_distance(q, c) == doctest::Approx(r).epsilon(1e-12));
    CHECK(std::abs(chart.to_plane(q)) == doctest::Approx(rho).epsilon(1e-12));
  }
  CHECK(plane_radius_to_chordal(rho) == doctest::Approx(r).epsilon(1e-14));
}

TEST_CASE("spherical derivative closed forms") {
  auto R = RationalMap::quadratic(0.0);
  CHECK(R.spherical_derivative(INF) == doctest::Approx(0.0));
  // |R'(1)| (1 + 1) / (1 + 1) = 2.
  CHECK(R.spherical_derivative(P(1)) == doctest::Approx(2.0).epsilon(1e-15));
  auto S = RationalMap::quadratic(-2.0);
  CHECK(S.spherical_derivative(P(2)) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(S.spherical_derivative(P(0)) == 0.0);
  // Pole of 1/(z^2 - 1) at z = 1: spherical derivative is finite and nonzero.
  auto T = RationalMap::from_coefficients({1.0}, {-1.0, 0.0, 1.0});
  const double at_pole = T.spherical_derivative(P(1));
  // |P'Q - PQ'| (1 + |z|^2) / (|P|^2 + |Q|^2) = 2 * 2 / 1.
  CHECK(at_pole == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("chain rule against composed polynomial") {
  // R = z^2 + (0.3 + 0.5i); R^n composed symbolically for n <= 4.
  const Complex c(0.3, 0.5);
  auto R = RationalMap::quadratic(c);
  Poly q({c, 0.0, 1.0});
  Poly Rn = q;
  for (int n = 1; n <= 4; ++n) {
    if (n > 1) Rn = compose(q, Rn);
    for (Complex z : {Complex(0.2, -0.1), Complex(-0.7, 0.4), Complex(1.1, 0.05)}) {
      double prod = 1.0;
      SpherePoint p = SpherePoint::from_complex(z);
      for (int k = 0; k < n; ++k) {
        prod *= R.spherical_derivative(p);
        p = R(p);
      }
      Complex v, dv;
      Rn.eval2(z, v, dv);
      const double direct = std::abs(dv) * (1.0 + std::norm(z)) / (1.0 + std::norm(v));
      CHECK(prod == doctest::Approx(direct).epsilon(1e-11));
    }
  }
}

TEST_CASE("chain rule along long orbits of z^2 - 2") {
  // Planar derivative product on [-2, 2] against the spherical product.
  auto R = RationalMap::quadratic(-2.0);
  for (double x : {0.3, -1.7, 1.234}) {
    SpherePoint p = P(x);
    double sph = 1.0, planar = 1.0;
    double y = x;
    for (int n = 1; n <= 20; ++n) {
      sph *= R.spherical_derivative(p);
      p = R(p);
      planar *= std::abs(2.0 * y);
      y = y * y - 2.0;
      const double expect = planar * (1.0 + x * x) / (1.0 + y * y);
      CHECK(sph == doctest::Approx(expect).epsilon(1e-9));
    }
  }
}
