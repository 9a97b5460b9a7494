#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <json.hpp>

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

const std::string kCli = BCTK_CLI_PATH;
const std::string kGolden = BCTK_GOLDEN_DIR;
const std::string kCheb = "'{\"quadratic_c\":[-2,0]}'";

struct Result {
  int code = -1;
  std::string out;
};

Result run(const std::string& args) {
  const std::string cmd = kCli + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  Result r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch() {
  const fs::path d = fs::temp_directory_path() / ("bctk_cli_" + std::to_string(::getpid()));
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("analyze reports the critical data of z^2 - 2") {
  const Result r = run("analyze --map " + kCheb);
  REQUIRE(r.code == 0);
  const Json j = Json::parse(r.out);
  CHECK(j["schema"] == "bctk/1");
  CHECK(j["command"] == "analyze");
  const Json& c0 = j["result"]["critical_points"][0];
  CHECK(c0["point"] == Json::array({0.0, 0.0}));
  CHECK(c0["mu"] == 2);
  CHECK(c0["in_julia"] == "yes");
  CHECK(c0["value"] == Json::array({-2.0, 0.0}));
  CHECK(j["result"]["critical_points"][1]["point"] == "inf");
  CHECK(r.out == slurp(fs::path(kGolden) / "analyze_chebyshev.json"));

  const Result s = run("check-summ --map " + kCheb + " --depth 30");
  REQUIRE(s.code == 0);
  CHECK(Json::parse(s.out)["result"]["reports"][0]["partial_sum"].get<double>() ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(s.out == slurp(fs::path(kGolden) / "check_summ_chebyshev.json"));
}

TEST_CASE("julia override flag") {
  const Result r = run("analyze --map " + kCheb + " --julia 0=no");
  REQUIRE(r.code == 0);
  const Json j = Json::parse(r.out);
  CHECK(j["result"]["critical_points"][0]["in_julia"] == "no");
  CHECK(j["result"]["julia_blocks"].empty());
  CHECK(run("analyze --map " + kCheb + " --julia 0=maybe").code == 2);
}

TEST_CASE("exit codes") {
  CHECK(run("analyze --map '{\"quadratic_c\":[-2,0}'").code == 2);
  CHECK(run("analyze --map '{\"numerator\":[[0,0],[1,0]],\"denominator\":[[1,0]]}'").code == 2);
  CHECK(run("analyze --map '{\"quadratic_c\":[-2,0],\"numerator\":[[1,0]]}'").code == 2);
  CHECK(run("analyze").code == 2);
  CHECK(run("check-bc --map " + kCheb + " --delta 0.02").code == 2);
  CHECK(run("check-bc --map " + kCheb + " --delta abc --delta-prime 0.08").code == 2);
  CHECK(run("check-bc --map " + kCheb + " --delta 0.08 --delta-prime 0.02").code == 2);
  CHECK(run("analyze --map " + kCheb + " --format xml").code == 2);
  CHECK(run("frobnicate").code == 2);
  CHECK(run("analyze --map " + kCheb + " --budget 0").code == 2);
  // No eventually periodic point within 0.001 of -2 among the fixed points.
  CHECK(run("thurston --map " + kCheb + " --delta 0.001 --depth 0 --max-period 1").code == 3);
  CHECK(run("analyze --map /nonexistent/map.json").code == 4);
  CHECK(run("analyze --map " + kCheb + " --out /nonexistent/dir/out.json").code == 4);
  CHECK(run("verify-nice --map " + kCheb + " --nice /nonexistent/nice.json").code == 4);
}

TEST_CASE("render") {
  const fs::path d = scratch();
  const std::string base = "render --map " + kCheb + " --viewport -2.2,2.2,-2.2,2.2 --width 256 --height 256";
  REQUIRE(run(base + " --out " + (d / "a.pgm").string()).code == 0);
  REQUIRE(run(base + " --workers 3 --out " + (d / "b.pgm").string()).code == 0);
  const std::string a = slurp(d / "a.pgm");
  CHECK(a == slurp(d / "b.pgm"));
  const std::string header = "P5\n256 256\n255\n";
  REQUIRE(a.size() == header.size() + 256 * 256);
  CHECK(a.substr(0, header.size()) == header);
  // The Julia set of z^2 - 2 is [-2, 2]: marked pixels hug the real axis.
  int marked = 0, off_axis = 0;
  for (int row = 0; row < 256; ++row)
    for (int col = 0; col < 256; ++col) {
      if (static_cast<unsigned char>(a[header.size() + row * 256 + col]) != 255) continue;
      ++marked;
      const double y = 2.2 - (row + 0.5) * 4.4 / 256;
      const double x = -2.2 + (col + 0.5) * 4.4 / 256;
      if (std::abs(y) > 0.05 || std::abs(x) > 2.05) ++off_axis;
    }
  CHECK(marked > 200);
  CHECK(off_axis == 0);

  CHECK(run("render --map " + kCheb + " --viewport 0,0,-1,1").code == 2);
  CHECK(run("render --map " + kCheb + " --width 9000").code == 2);
  fs::remove_all(d);
}

TEST_CASE("reproducible reports") {
  const fs::path d = scratch();
  const std::string nest = (d / "nest.json").string();
  REQUIRE(run("nice-nest --map " + kCheb + " --delta0 0.01 --tau 0.5 --eta 1.5 --ell 0 --levels 2 --depth 6 --out " +
              nest)
              .code == 0);
  const std::string area = "area-ratio --map " + kCheb + " --nest " + nest + " --level 1 --depth 20 --samples 500";
  const Result a1 = run(area + " --seed 7");
  const Result a2 = run(area + " --seed 7 --workers 3");
  const Result b = run(area + " --seed 8");
  REQUIRE(a1.code == 0);
  CHECK(a1.out == a2.out);
  CHECK(a1.out != b.out);
  const Json j = Json::parse(a1.out);
  CHECK(j["config"]["seed"] == 7);
  const double xi = j["result"]["xi"].get<double>();
  CHECK(xi >= 0.0);
  CHECK(xi <= 1.0);

  const Result v = run("verify-nice --map " + kCheb + " --nice " + nest + " --depth 4");
  CHECK(v.code == 2);  // a nest file is not a nice set
  fs::remove_all(d);
}

TEST_CASE("modulus and thurston subcommands") {
  const Result m = run("modulus --annulus '{\"round\":{\"r\":1,\"R\":2.718281828459045}}' --grid 128");
  REQUIRE(m.code == 0);
  const Json r = Json::parse(m.out)["result"];
  CHECK(r["lower"].get<double>() <= 1.0);
  CHECK(r["upper"].get<double>() >= 1.0);
  CHECK(std::abs(r["estimate"].get<double>() - 1.0) < 0.02);

  // Misiurewicz z^2 + i: 0 -> i -> -1 + i -> -i -> -1 + i.
  const std::string dyn =
      "'{\"degree\":2,\"marked\":[[0,0],[0,1],[-1,1],[0,-1],\"inf\"],\"sigma\":[1,2,3,2,4],"
      "\"critical\":[{\"index\":0,\"mu\":2},{\"index\":4,\"mu\":2}]}'";
  const Result t = run("thurston --dynamics " + dyn + " --max-iter 50");
  REQUIRE(t.code == 0);
  const Json tr = Json::parse(t.out)["result"];
  CHECK(tr["converged"] == true);
  CHECK(std::abs(tr["c"][0].get<double>()) < 1e-8);
  CHECK(std::abs(tr["c"][1].get<double>() - 1.0) < 1e-8);
  CHECK(tr["residual"].get<double>() < 1e-10);
  CHECK(run("thurston --dynamics '{\"degree\":2,\"marked\":[[0,0]],\"sigma\":[0],\"critical\":[]}'").code == 2);
}
