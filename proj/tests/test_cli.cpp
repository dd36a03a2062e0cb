// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "curlrec/cli.hpp"
#include "curlrec/io.hpp"

using namespace curlrec;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  REQUIRE(f.good());
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& tag) {
  fs::path d = fs::temp_directory_path() / ("curlrec_test_" + tag);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("config entries parse and unknown keys are rejected") {
  RunConfig cfg;
  apply_config_entry(cfg, "p", "3");
  apply_config_entry(cfg, "q", "5");
  apply_config_entry(cfg, "omega", "2.5");
  apply_config_entry(cfg, "square", "4");
  apply_config_entry(cfg, "solution", "poly2");
  apply_config_entry(cfg, "theta", "0.7");
  CHECK(cfg.p == 3);
  CHECK(cfg.q == 5);
  CHECK(cfg.omega == 2.5);
  CHECK(cfg.square == 4);
  CHECK(cfg.solution == "poly2");
  CHECK(cfg.theta == 0.7);
  CHECK_THROWS_AS(apply_config_entry(cfg, "frobnicate", "1"), ConfigError);
  CHECK_THROWS_AS(apply_config_entry(cfg, "p", "three"), ConfigError);
}

TEST_CASE("config validation rejects inconsistent settings") {
  RunConfig cfg;
  cfg.command = "solve";
  cfg.square = 2;
  cfg.validate();  // fine
  RunConfig bad = cfg;
  bad.q = 1;
  bad.p = 2;  // q < p + 1
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.theta = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.omega = -1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.command = "explode";
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.solution = "nonsense";
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  CHECK(RunConfig{}.resolved_q() == 3);  // default p = 1, q = p + 2
}

TEST_CASE("config files: key = value lines, comments, line-numbered errors") {
  fs::path dir = fresh_dir("config");
  fs::path good = dir / "good.cfg";
  {
    std::ofstream f(good);
    f << "# a comment\n"
      << "p = 2\n"
      << "\n"
      << "solution = poly2\n"
      << "square = 4\n";
  }
  RunConfig cfg = load_config_file(good.string());
  CHECK(cfg.p == 2);
  CHECK(cfg.solution == "poly2");
  CHECK(cfg.square == 4);

  fs::path bad = dir / "bad.cfg";
  {
    std::ofstream f(bad);
    f << "p = 2\nnot a key value line\n";
  }
  try {
    load_config_file(bad.string());
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  CHECK_THROWS_AS(load_config_file((dir / "missing.cfg").string()), ConfigError);
}

TEST_CASE("solve writes the solution field, the mesh, and a metadata echo") {
  fs::path dir = fresh_dir("solve");
  RunConfig cfg;
  cfg.command = "solve";
  cfg.square = 2;
  cfg.p = 1;
  cfg.solution = "poly2";
  cfg.out_dir = dir.string();
  CHECK(cli_run(cfg) == 0);
  CHECK(fs::exists(dir / "solution.field"));
  CHECK(fs::exists(dir / "mesh.txt"));
  std::string field = slurp(dir / "solution.field");
  CHECK(field.rfind("field 1 2 8", 0) == 0);  // header: p arity ncells
  // the mesh file round-trips through the reader
  std::ifstream mf(dir / "mesh.txt");
  Mesh m = read_mesh(mf);
  CHECK(m.num_cells() == 8);
}

TEST_CASE("estimate and study outputs carry headers and metadata comments") {
  fs::path dir = fresh_dir("study");
  RunConfig cfg;
  cfg.command = "study-h";
  cfg.square = 2;
  cfg.levels = 2;
  cfg.p = 1;
  cfg.solution = "trig";
  cfg.out_dir = dir.string();
  CHECK(cli_run(cfg) == 0);
  std::string csv = slurp(dir / "study_h.csv");
  CHECK(csv.rfind("level,h_max,ndof,err_sharp,eta,", 0) == 0);
  CHECK(csv.find("# config command=study-h") != std::string::npos);
  CHECK(csv.find("version=") != std::string::npos);
}

TEST_CASE("deterministic outputs: same config twice is bitwise identical") {
  for (const char* cmd : {"study-h", "estimate"}) {
    fs::path d1 = fresh_dir(std::string(cmd) + "_a");
    fs::path d2 = fresh_dir(std::string(cmd) + "_b");
    RunConfig cfg;
    cfg.command = cmd;
    cfg.square = 2;
    cfg.levels = 2;
    cfg.p = 1;
    cfg.seed = 3;
    cfg.solution = "trig";
    cfg.out_dir = d1.string();
    CHECK(cli_run(cfg) == 0);
    cfg.out_dir = d2.string();
    CHECK(cli_run(cfg) == 0);
    for (const auto& entry : fs::directory_iterator(d1)) {
      fs::path other = d2 / entry.path().filename();
      REQUIRE(fs::exists(other));
      CHECK(slurp(entry.path()) == slurp(other));
    }
  }
}

TEST_CASE("adaptive loop with theta = 1 reproduces uniform refinement") {
  fs::path dir = fresh_dir("adapt_uniform");
  RunConfig cfg;
  cfg.command = "adapt";
  cfg.lshape = 1;
  cfg.p = 1;
  cfg.theta = 1.0;
  cfg.levels = 3;
  cfg.solution = "lshape";
  cfg.out_dir = dir.string();
  CHECK(cli_run(cfg) == 0);
  // expected ndof sequence: refine every cell each iteration
  Mesh m = l_shape_mesh(1);
  std::vector<int> expect;
  for (int it = 0; it < 3; ++it) {
    expect.push_back(m.num_cells() * 6);  // cells x block size (p=1: 2 x 3 modes)
    if (it + 1 < 3) {
      std::vector<int> all(m.num_cells());
      for (int k = 0; k < m.num_cells(); ++k) all[k] = k;
      m = refine(m, all);
    }
  }
  std::ifstream csv(dir / "adapt.csv");
  std::string line;
  std::getline(csv, line);  // header
  for (int it = 0; it < 3; ++it) {
    REQUIRE(std::getline(csv, line));
    std::stringstream ss(line);
    std::string tok;
    std::getline(ss, tok, ',');  // iter
    std::getline(ss, tok, ',');  // ndof
    CHECK(std::stoi(tok) == expect[it]);
  }
}

TEST_CASE("adaptive L-shape run concentrates refinement at the corner") {
  fs::path dir = fresh_dir("adapt_corner");
  RunConfig cfg;
  cfg.command = "adapt";
  cfg.lshape = 2;
  cfg.p = 1;
  cfg.theta = 0.5;
  cfg.levels = 6;
  cfg.solution = "lshape";
  cfg.out_dir = dir.string();
  CHECK(cli_run(cfg) == 0);
  // the final mesh is written out; its smallest cells must touch the
  // reentrant corner at the origin
  std::ifstream mf(dir / "mesh_final.txt");
  REQUIRE(mf.good());
  Mesh m = read_mesh(mf);
  double hmin = *std::min_element(m.cell_diameter.begin(), m.cell_diameter.end());
  double best = 1e9;
  for (int k = 0; k < m.num_cells(); ++k) {
    if (m.cell_diameter[k] > 1.5 * hmin) continue;
    for (int v : m.cells[k])
      best = std::min(best, m.vertices[v].norm());
  }
  CHECK(best <= 1e-12);  // some smallest cell has a vertex at the origin
}

TEST_CASE("verify returns failure status when an oracle fails") {
  // with a tiny penalty the coercivity oracle must fail and the exit code
  // reflects it
  fs::path dir = fresh_dir("verify_fail");
  RunConfig cfg;
  cfg.command = "verify";
  cfg.square = 2;
  cfg.eta_star = 0.01;
  cfg.out_dir = dir.string();
  CHECK(cli_run(cfg) != 0);
  std::string report = slurp(dir / "verify.txt");
  CHECK(report.find("FAIL coercivity") != std::string::npos);
}
