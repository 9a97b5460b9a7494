#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "bctk/io.hpp"
#include "bctk/render.hpp"

using namespace bctk;

TEST_CASE("points and maps") {
  CHECK(to_json(SpherePoint::infinity()) == "inf");
  CHECK(point_from_json("inf").is_infinity());
  CHECK(to_json(Complex(1.5, -0.0)) == Json::array({1.5, 0.0}));
  CHECK(complex_from_json(Json::array({2.0, 3.0})) == Complex(2.0, 3.0));
  CHECK_THROWS_AS(complex_from_json(Json::array({1.0})), PreconditionError);
  CHECK_THROWS_AS(point_from_json("nan"), PreconditionError);

  const RationalMap R = map_from_json({{"quadratic_c", {-1.0, 0.0}}});
  const RationalMap S = map_from_json(map_to_json(R));
  for (Complex z : {Complex(0.3, 0.1), Complex(-2.0, 1.0)}) CHECK(std::abs(R(z) - S(z)) < 1e-15);
  CHECK_THROWS_AS(map_from_json(Json::object()), PreconditionError);
  CHECK_THROWS_AS(map_from_json({{"numerator", Json::array({Json::array({1.0, 0.0})})}}), PreconditionError);
}

TEST_CASE("nice set round trip") {
  const RationalMap R = RationalMap::quadratic(-2.0);
  const NiceSet V = tilde_ball_set(R, 0.05, 128);
  const NiceSet W = nice_set_from_json(nice_set_to_json(V));
  REQUIRE(W.domains.size() == V.domains.size());
  for (const auto& [id, D] : V.domains) {
    const Domain& E = W.domains.at(id);
    REQUIRE(E.outer().size() == D.outer().size());
    for (std::size_t i = 0; i < D.outer().size(); ++i) CHECK(chordal_distance(E.outer()[i], D.outer()[i]) < 1e-15);
  }
  for (Complex z : {Complex(0.0), Complex(0.1, 0.0), Complex(1.0, 0.0), Complex(0.0, 0.2)})
    CHECK(V.contains(SpherePoint::from_complex(z)) == W.contains(SpherePoint::from_complex(z)));
  CHECK(W.params.kind == V.params.kind);

  Json bad = nice_set_to_json(V);
  bad["domains"]["x"] = bad["domains"]["0"];
  CHECK_THROWS_AS(nice_set_from_json(bad), PreconditionError);
}

TEST_CASE("dynamics round trip") {
  MarkedDynamics dyn;
  dyn.degree = 2;
  dyn.marked = {SpherePoint::from_complex(0.0), SpherePoint::from_complex({0.0, 1.0}),
                SpherePoint::from_complex({-1.0, 1.0}), SpherePoint::from_complex({0.0, -1.0}),
                SpherePoint::infinity()};
  dyn.sigma = {1, 2, 3, 2, 4};
  dyn.critical = {{0, 2}, {4, 2}};
  const MarkedDynamics back = dynamics_from_json(dynamics_to_json(dyn));
  CHECK(back.sigma == dyn.sigma);
  CHECK(back.marked.size() == 5);
  CHECK(back.marked[4].is_infinity());
  Json bad = dynamics_to_json(dyn);
  bad["sigma"] = {1, 2, 3, 9, 4};
  CHECK_THROWS_AS(dynamics_from_json(bad), PreconditionError);
}

TEST_CASE("annulus input") {
  const AnnulusRegion A = annulus_from_json({{"round", {{"r", 1.0}, {"R", 2.0}, {"samples", 64}}}});
  CHECK(A.outer.size() == 64);
  CHECK_THROWS_AS(annulus_from_json({{"round", {{"r", 2.0}, {"R", 1.0}}}}), PreconditionError);
}

TEST_CASE("atomic writes and pgm") {
  namespace fs = std::filesystem;
  const fs::path p = fs::temp_directory_path() / "bctk_io_test.pgm";
  const std::string bytes = to_pgm({0, 255, 85, 170}, 2, 2);
  CHECK(bytes == std::string("P5\n2 2\n255\n\x00\xff\x55\xaa", 15));
  write_file_atomic(p.string(), bytes);
  CHECK(read_text_file(p.string()) == bytes);
  fs::remove(p);
  CHECK_THROWS_AS(write_file_atomic("/nonexistent/dir/x", "a"), IoError);
  CHECK_THROWS_AS(read_text_file("/nonexistent/file"), IoError);
  CHECK_THROWS_AS(to_pgm({0, 1, 2}, 2, 2), PreconditionError);
}

TEST_CASE("Julia mask of z^2") {
  const RationalMap R = RationalMap::quadratic(0.0);
  RenderOptions o;
  o.width = o.height = 128;
  const auto px = render_mask(R, o);
  int marked = 0;
  for (int row = 0; row < 128; ++row)
    for (int col = 0; col < 128; ++col) {
      if (px[row * 128 + col] != kJuliaLevel) continue;
      ++marked;
      const Complex z(-2.0 + (col + 0.5) / 32.0, 2.0 - (row + 0.5) / 32.0);
      CHECK(std::abs(std::abs(z) - 1.0) < 2.0 / 32.0);
    }
  CHECK(marked > 100);
  o.width = 0;
  CHECK_THROWS_AS(render_mask(R, o), PreconditionError);
}
