#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "spikes/errors.hpp"
#include "spikes/grid.hpp"
#include "spikes/io.hpp"

using namespace spikes;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string write_tmp(const std::string& content) {
  static int n = 0;
  std::string path = "/tmp/spikes_io_test_" + std::to_string(n++) + ".cfg";
  std::ofstream out(path);
  out << content;
  return path;
}

}  // namespace

TEST_CASE("fmt_g17 round trips doubles exactly") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 2.3919564032240848, -7.25, 1e17}) {
    const std::string s = fmt_g17(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
  CHECK(fmt_g17(0.5) == "0.5");
}

TEST_CASE("atomic_write leaves no temp file") {
  const std::string path = "/tmp/spikes_io_test_atomic.txt";
  atomic_write(path, "first\n");
  CHECK(slurp(path) == "first\n");
  atomic_write(path, "second\n");  // overwrite through rename
  CHECK(slurp(path) == "second\n");
  std::ifstream tmp(path + ".tmp");
  CHECK_FALSE(tmp.good());
  std::remove(path.c_str());
}

TEST_CASE("config parsing with sections, comments and arrays") {
  const std::string path = write_tmp(
      "# run configuration\n"
      "[model]\n"
      "dimension = 2\n"
      "p = 3.5   # supercritical-ish\n"
      "lambda = [2, 1, -0.5]\n"
      "cubic = 0.1\n"
      "\n"
      "[run]\n"
      "epsilon = [0.1, 0.05, 0.025]\n"
      "beta = 0.7\n"
      "seed = 99\n"
      "[family]\n"
      "kind = star\n"
      "ell = 4\n"
      "h = 4\n"
      "k = 0\n"
      "[grid]\n"
      "L = 1.2\n"
      "n = 301\n");
  const RunConfig rc = load_config(path);
  std::remove(path.c_str());
  CHECK(rc.dimension == 2);
  CHECK(rc.p == 3.5);
  CHECK(rc.lambda.size() == 3);
  CHECK(rc.lambda[2] == -0.5);
  CHECK(rc.cubic == 0.1);
  CHECK(rc.ladder.size() == 3);
  CHECK(rc.ladder[1] == 0.05);
  CHECK(rc.beta == 0.7);
  CHECK(rc.seed == 99);
  CHECK(rc.family == "star");
  CHECK(rc.ell == 4);
  CHECK(rc.grid_L == 1.2);
  CHECK(rc.grid_n == 301);
  // untouched keys fall back to defaults
  CHECK(rc.tol == 1e-8);
  CHECK(rc.mu == 0.5);
  CHECK(rc.trials == 10000);
  CHECK(rc.raw.count("model.lambda") == 1);
}

TEST_CASE("config defaults") {
  const RunConfig rc = default_config();
  CHECK(rc.dimension == 2);
  CHECK(rc.p == 3.0);
  CHECK(rc.lambda.size() == 2);
  CHECK(rc.lambda[0] == 1.0);
  CHECK(rc.lambda[1] == -1.0);
  CHECK(rc.ladder.size() == 3);
  CHECK(rc.beta == 0.9);
  CHECK(rc.family == "chain");
}

TEST_CASE("config rejection") {
  auto bad = [](const std::string& body) {
    const std::string path = write_tmp(body);
    bool threw = false;
    try {
      (void)load_config(path);
    } catch (const Error& e) {
      threw = e.kind() == ErrorKind::BadConfig;
    }
    std::remove(path.c_str());
    return threw;
  };
  CHECK(bad("dimension = 2\n"));                                  // key outside any section
  CHECK(bad("[run]\nepsilon = [0.05, 0.1]\n"));                   // ladder not decreasing
  CHECK(bad("[run]\nepsilon = []\n"));                            // empty ladder
  CHECK(bad("[run]\nbeta = 1.5\n"));                              // beta outside (0,1)
  CHECK(bad("[model]\np = 2\n"));                                 // p must exceed 2
  CHECK(bad("[model]\ndimension = 4\n"));                         // unsupported dimension
  CHECK(bad("[run]\nepsilon = 0.1\n"));                           // array syntax required
  CHECK(bad("[run]\nbeta\n"));                                    // no assignment
  CHECK(bad("[model\np = 3\n"));                                  // malformed section
  CHECK_THROWS_AS((void)load_config("/tmp/no_such_config.cfg"), Error);
}

TEST_CASE("manifest echoes config and stages") {
  RunConfig rc = default_config();
  rc.seed = 4242;
  ManifestWriter man("reduce", rc, rc.seed);
  man.add_file("profile", "profile.csv");
  man.add_scalar("reduce", "J", 1.25);
  man.add_scalar("reduce", "grad_norm", 3e-10);
  man.add_wall_ms("reduce", 17.0);
  const std::string dir = "/tmp/spikes_io_test_manifest";
  std::system(("mkdir -p " + dir).c_str());
  man.write(dir);
  const auto j = nlohmann::json::parse(slurp(dir + "/manifest.json"));
  CHECK(j["toolkit_version"] == kToolkitVersion);
  CHECK(j["command"] == "reduce");
  CHECK(j["seed"] == 4242);
  CHECK(j["config"]["run.beta"] == fmt_g17(0.9));
  CHECK(j["config"]["model.lambda"] == "[1, -1]");
  CHECK(j["stages"].size() == 2);
  CHECK(j["stages"][0]["name"] == "profile");
  CHECK(j["stages"][0]["outputs"][0] == "profile.csv");
  CHECK(j["stages"][1]["scalars"]["J"] == "1.25");
  CHECK(j["stages"][1]["wall_ms"] == 17.0);
  std::remove((dir + "/manifest.json").c_str());
}

TEST_CASE("jsonl solver log") {
  JsonlLog log;
  CHECK(log.empty());
  log.add(1, 0.125, 1.0);
  log.add(2, 3.5e-9, 0.5);
  CHECK_FALSE(log.empty());
  const std::string path = "/tmp/spikes_io_test_log.jsonl";
  log.write(path);
  std::ifstream in(path);
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j.contains("iteration"));
    CHECK(j.contains("residual"));
    CHECK(j.contains("damping"));
    ++rows;
  }
  CHECK(rows == 2);
  std::remove(path.c_str());
}

TEST_CASE("field binary format") {
  Grid g = make_grid(1.5, 5);
  GridField f = zero_field(g);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) f.at(i, j) = 0.1 * i - 1.7 * j + 0.25;
  const std::string path = "/tmp/spikes_io_test_field.bin";
  save_field_binary(f, path);
  // layout: int32 n, float64 L, then n^2 row-major float64
  const std::string bytes = slurp(path);
  CHECK(bytes.size() == 4 + 8 + 25 * 8);
  GridField back = load_field_binary(path);
  CHECK(back.g.n == 5);
  CHECK(back.g.L == 1.5);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) CHECK(back.at(i, j) == f.at(i, j));
  std::remove(path.c_str());
  CHECK_THROWS_AS((void)load_field_binary("/tmp/no_such_field.bin"), Error);
  CHECK_THROWS_AS((void)make_grid(1.0, 4), Error);  // even n
}
