#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "brinkmann/catalog.hpp"
#include "brinkmann/cli.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int status = 0;
  std::string out;
  std::string err;
};

Outcome invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  Outcome o;
  o.status = brinkmann::cli::run(args, out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

fs::path scratch_dir() {
  const auto dir = fs::temp_directory_path() / "brinkmann_cli_tests";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);)
    if (!l.empty()) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("scan of the Clifton-Pohl torus to CSV") {
  const auto path = scratch_dir() / "r.csv";
  const auto o = invoke({"scan", "--spacetime", "clifton_pohl", "--samples", "100", "--seed", "7", "--tmax", "50",
                         "--out", path.string()});
  REQUIRE(o.status == 0);
  const auto rows = lines(slurp(path));
  REQUIRE(rows.size() == 101);
  CHECK(rows.front().rfind("index,seed,", 0) == 0);
  int escapes = 0;
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i].find("EscapeAt") != std::string::npos) ++escapes;
  CHECK(escapes >= 1);
}

TEST_CASE("certify minkowski") {
  const auto path = scratch_dir() / "c.json";
  REQUIRE(invoke({"certify", "--spacetime", "minkowski", "--out", path.string()}).status == 0);
  const auto j = json::parse(slurp(path));
  CHECK(j["command"] == "certify");
  CHECK(j["pass"] == true);
  for (const char* k : {"max_nabla_V", "max_g_VV", "max_d_alpha"}) CHECK(j[k].get<double>() < 1e-10);
}

TEST_CASE("a failing certificate is still a successful run") {
  const auto o = invoke({"certify", "--spacetime", "clifton_pohl_3d", "--format", "json"});
  CHECK(o.status == 0);
  CHECK(json::parse(o.out)["pass"] == false);
}

TEST_CASE("unknown spacetime is a usage error naming the keys") {
  const auto o = invoke({"geodesic", "--spacetime", "nosuch", "--tmax", "1"});
  CHECK(o.status == 2);
  for (const auto& k : brinkmann::catalog_keys()) CHECK(o.err.find(k) != std::string::npos);
}

TEST_CASE("argument errors") {
  CHECK(invoke({}).status == 2);
  CHECK(invoke({"frobnicate"}).status == 2);
  CHECK(invoke({"scan", "--spacetime", "minkowski", "--samples", "many"}).status == 2);
  CHECK(invoke({"ricci"}).status == 2);
  CHECK(invoke({"ricci", "--H", "z1^^2"}).status == 2);
  CHECK(invoke({"ricci", "--H", "z1^2", "--dim", "1"}).status == 2);
  CHECK(invoke({"geodesic", "--spacetime", "minkowski", "--spec", "x.json"}).status == 2);
  CHECK(invoke({"geodesic", "--spacetime", "minkowski", "--init", "1,2;3"}).status == 2);
}

TEST_CASE("library errors exit 1") {
  const auto o = invoke({"geodesic", "--spacetime", "half_plane", "--init", "0,-1;1,0", "--tmax", "1"});
  CHECK(o.status == 1);
  CHECK_FALSE(o.err.empty());
}

TEST_CASE("geodesic with an explicit initial condition") {
  const auto o = invoke({"geodesic", "--spacetime", "clifton_pohl", "--init", "1,0;1,0", "--tmax", "2", "--format", "json"});
  REQUIRE(o.status == 0);
  const auto j = json::parse(o.out);
  CHECK(j["termination"]["kind"] == "EscapeAt");
  CHECK(j["termination"]["t"].get<double>() == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("byte-identical JSON for repeated runs") {
  const std::vector<std::vector<std::string>> commands = {
      {"list", "--format", "json"},
      {"geodesic", "--spacetime", "rosen_torus", "--seed", "3", "--tmax", "5", "--format", "json"},
      {"scan", "--spacetime", "rosen_torus", "--samples", "8", "--seed", "3", "--tmax", "5", "--format", "json"},
      {"certify", "--spacetime", "pp_wave", "--samples", "16", "--format", "json"},
      {"flow", "--spacetime", "suspension_anosov", "--samples", "4", "--tmax", "5", "--grid", "10", "--format", "json"},
      {"ricci", "--H", "z1^2+z2^2", "--samples", "10", "--seed", "2", "--format", "json"},
  };
  for (const auto& c : commands) {
    CAPTURE(c.front());
    const auto a = invoke(c);
    const auto b = invoke(c);
    REQUIRE(a.status == 0);
    CHECK(a.out == b.out);
    CHECK(json::accept(a.out));
  }
}

TEST_CASE("output does not depend on the worker count") {
  const std::vector<std::string> base{"scan", "--spacetime", "clifton_pohl", "--samples", "12", "--seed", "1",
                                      "--tmax", "10", "--format", "json"};
  auto with_jobs = base;
  with_jobs.insert(with_jobs.end(), {"--jobs", "3"});
  const auto one = invoke(base);
  CHECK(one.out == invoke(with_jobs).out);
  ::setenv("BRINKMANN_JOBS", "2", 1);
  const auto env = invoke(base);
  ::setenv("BRINKMANN_JOBS", "zero", 1);
  const auto bad = invoke(base);
  ::unsetenv("BRINKMANN_JOBS");
  CHECK(one.out == env.out);
  CHECK(bad.status == 2);
}

TEST_CASE("spec files round-trip through list") {
  const auto list = json::parse(invoke({"list", "--format", "json"}).out);
  const auto path = scratch_dir() / "rosen.json";
  for (const auto& e : list["entries"]) {
    if (e["key"] != "rosen_torus") continue;
    std::ofstream(path) << e["document"].dump();
  }
  const std::vector<std::string> tail{"--seed", "4", "--tmax", "3", "--format", "json"};
  auto by_key = std::vector<std::string>{"geodesic", "--spacetime", "rosen_torus"};
  auto by_file = std::vector<std::string>{"geodesic", "--spec", path.string()};
  by_key.insert(by_key.end(), tail.begin(), tail.end());
  by_file.insert(by_file.end(), tail.begin(), tail.end());
  const auto a = invoke(by_key);
  const auto b = invoke(by_file);
  REQUIRE(a.status == 0);
  REQUIRE(b.status == 0);
  auto ja = json::parse(a.out);
  auto jb = json::parse(b.out);
  ja.erase("spacetime");
  jb.erase("spacetime");
  CHECK(ja == jb);
}

TEST_CASE("catalog parameters") {
  const auto o = invoke({"certify", "--spacetime", "pp_wave", "--param", "H=z1^3", "--param", "n=2", "--samples", "8",
                         "--format", "json"});
  CHECK(o.status == 0);
  CHECK(invoke({"certify", "--spacetime", "pp_wave", "--param", "H"}).status == 2);
  CHECK(invoke({"certify", "--spacetime", "suspension_anosov", "--param", "A=1,1;0,1"}).status == 2);
}
