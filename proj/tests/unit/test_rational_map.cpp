#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "bctk/rational_map.hpp"

using namespace bctk;

namespace {
SpherePoint P(double re, double im = 0.0) { return SpherePoint::from_complex({re, im}); }
const SpherePoint INF = SpherePoint::infinity();

int rh_sum(const RationalMap& R) {
  int s = 0;
  for (const auto& c : R.critical_points()) s += c.local_degree - 1;
  return s;
}
}  // namespace

TEST_CASE("construction preconditions") {
  CHECK_THROWS_AS(RationalMap::from_coefficients({1.0, 1.0}, {1.0}), PreconditionError);
  // (z - 1)(z + 1) / (z - 1) shares a root.
  CHECK_THROWS_AS(RationalMap::from_coefficients({-1.0, 0.0, 1.0}, {-1.0, 1.0}), PreconditionError);
  CHECK_THROWS_AS(RationalMap::from_coefficients({0.0}, {1.0}), PreconditionError);
  auto R = RationalMap::from_coefficients({-4.0, 0.0, 2.0}, {2.0});
  CHECK(R.degree() == 2);
  CHECK(std::abs(R(Complex(2.0)) - Complex(2.0)) < 1e-15);
}

TEST_CASE("critical points of z^2 and z^3 - 3z") {
  auto R = RationalMap::quadratic(0.0);
  const auto& c = R.critical_points();
  REQUIRE(c.size() == 2);
  CHECK(c[0].point.finite() == Complex(0.0));
  CHECK(c[1].point.is_infinity());
  CHECK(c[0].local_degree == 2);
  CHECK(c[1].local_degree == 2);
  CHECK(c[0].in_julia == JuliaStatus::No);
  CHECK(c[1].in_julia == JuliaStatus::No);
  CHECK(R.critical_blocks().size() == 2);

  auto T = RationalMap::from_coefficients({0.0, -3.0, 0.0, 1.0}, {1.0});
  const auto& ct = T.critical_points();
  REQUIRE(ct.size() == 3);
  CHECK(std::abs(ct[0].point.finite() - Complex(-1.0)) < 1e-12);
  CHECK(std::abs(ct[1].point.finite() - Complex(1.0)) < 1e-12);
  CHECK(ct[2].point.is_infinity());
  CHECK(ct[2].local_degree == 3);
  CHECK(ct[0].in_julia == JuliaStatus::Yes);
  CHECK(ct[1].in_julia == JuliaStatus::Yes);
  CHECK(T.julia_blocks().size() == 2);
}

TEST_CASE("z^3 has two triple critical points") {
  auto R = RationalMap::from_coefficients({0.0, 0.0, 0.0, 1.0}, {1.0});
  const auto& c = R.critical_points();
  REQUIRE(c.size() == 2);
  CHECK(c[0].local_degree == 3);
  CHECK(c[1].local_degree == 3);
}

TEST_CASE("Riemann-Hurwitz on random maps of degree 2..5") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 2 + trial % 4;
    const int dq = (trial / 4) % (d + 1);
    std::vector<Complex> num(d + 1), den(dq + 1);
    for (auto& x : num) x = {g(rng), g(rng)};
    for (auto& x : den) x = {g(rng), g(rng)};
    auto R = RationalMap::from_coefficients(num, den);
    CHECK(rh_sum(R) == 2 * d - 2);
    for (const auto& c : R.critical_points()) CHECK(R.spherical_derivative(c.point) < 1e-6);
  }
}

TEST_CASE("preimages with multiplicity") {
  auto R = RationalMap::quadratic(0.0);
  auto a = R.preimages(P(0));
  REQUIRE(a.size() == 1);
  CHECK(a[0].multiplicity == 2);
  CHECK(std::abs(a[0].point.finite()) < 1e-12);
  auto b = R.preimages(P(1));
  REQUIRE(b.size() == 2);
  CHECK(std::abs(b[0].point.finite() - Complex(-1.0)) < 1e-14);
  CHECK(std::abs(b[1].point.finite() - Complex(1.0)) < 1e-14);
  auto c = R.preimages(INF);
  REQUIRE(c.size() == 1);
  CHECK(c[0].point.is_infinity());
  CHECK(c[0].multiplicity == 2);
  // Preimages of a point near infinity of a map with a pole.
  auto T = RationalMap::from_coefficients({1.0, 0.0, 1.0}, {0.0, 1.0});
  auto t = T.preimages(P(1e7, 3.0));
  int total = 0;
  for (auto& p : t) {
    total += p.multiplicity;
    CHECK(chordal_distance(T(p.point), P(1e7, 3.0)) < 1e-12);
  }
  CHECK(total == 2);
}

TEST_CASE("preimages of random targets") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.0, 1.0);
  auto R = RationalMap::from_coefficients({{0.2, 0.1}, {-1.0, 0.3}, 0.0, 1.0}, {{0.5, -0.2}, 1.0});
  for (int i = 0; i < 200; ++i) {
    SpherePoint w = P(g(rng), g(rng));
    auto pre = R.preimages(w);
    int total = 0;
    for (auto& p : pre) {
      total += p.multiplicity;
      CHECK(chordal_distance(R(p.point), w) < 1e-10);
    }
    CHECK(total == 3);
  }
}

TEST_CASE("Julia classification") {
  auto a = RationalMap::quadratic(-2.0);
  CHECK(a.critical_points()[0].in_julia == JuliaStatus::Yes);
  CHECK(a.critical_points()[1].in_julia == JuliaStatus::No);
  auto b = RationalMap::quadratic({0.0, 1.0});
  CHECK(b.critical_points()[0].in_julia == JuliaStatus::Yes);
  auto c = RationalMap::quadratic(-1.0);  // superattracting 2-cycle
  CHECK(c.critical_points()[0].in_julia == JuliaStatus::No);
  auto d = RationalMap::quadratic(0.25);  // parabolic
  CHECK(d.critical_points()[0].in_julia == JuliaStatus::Undetermined);
  auto e = RationalMap::quadratic(-0.1);  // attracting fixed point
  CHECK(e.critical_points()[0].in_julia == JuliaStatus::No);
  ClassifyOptions opt;
  opt.overrides[0] = JuliaStatus::Yes;
  auto f = d.reclassified(opt);
  CHECK(f.critical_points()[0].in_julia == JuliaStatus::Yes);
  CHECK(f.critical_points()[0].evidence == "user override");
}

TEST_CASE("critical blocks chain critical orbits") {
  // z^3 - 3z - 1 sends -1 to the critical point 1. Only points declared in
  // the Julia set are chained.
  auto plain = RationalMap::from_coefficients({-1.0, -3.0, 0.0, 1.0}, {1.0});
  CHECK(plain.critical_blocks().size() == 3);
  ClassifyOptions opt;
  opt.overrides = {{0, JuliaStatus::Yes}, {1, JuliaStatus::Yes}};
  auto R = RationalMap::from_coefficients({-1.0, -3.0, 0.0, 1.0}, {1.0}, opt);
  const auto& blocks = R.critical_blocks();
  REQUIRE(blocks.size() == 2);
  const auto& chain = blocks[0].members.size() == 2 ? blocks[0] : blocks[1];
  REQUIRE(chain.members.size() == 2);
  CHECK(std::abs(R.critical_points()[chain.members[0]].point.finite() - Complex(-1.0)) < 1e-12);
  CHECK(std::abs(R.critical_points()[chain.tail].point.finite() - Complex(1.0)) < 1e-12);
  CHECK(chain.multiplicity == 4);
  CHECK(std::abs(chain.value.finite() - Complex(-3.0)) < 1e-12);
}

TEST_CASE("periodic point refinement") {
  auto R = RationalMap::quadratic({0.0, 1.0});
  auto [z, lambda] = refine_periodic_point(R, P(-1.01, 1.0), 2);
  CHECK(std::abs(z.finite() - Complex(-1.0, 1.0)) < 1e-13);
  CHECK(std::abs(lambda) == doctest::Approx(4.0 * std::sqrt(2.0)).epsilon(1e-12));
}
