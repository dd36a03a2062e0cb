// SPDX-License-Identifier: Apache-2.0
//
// End-to-end acceptance gate. Each numbered check prints one pass/fail line;
// the process exits nonzero if any check fails.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include "curlrec/cli.hpp"

using namespace curlrec;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(const std::string& name, bool ok, const std::string& detail) {
  std::cout << (ok ? "PASS " : "FAIL ") << name << " (" << detail << ")\n";
  if (!ok) ++failures;
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(6);
  ss << v;
  return ss.str();
}

double max_of(const std::vector<double>& v) {
  return *std::max_element(v.begin(), v.end());
}
double min_of(const std::vector<double>& v) {
  return *std::min_element(v.begin(), v.end());
}

/// Relative spread max/min - 1 of a positive sequence.
double variation(const std::vector<double>& v) {
  return max_of(v) / min_of(v) - 1.0;
}

/// Least-squares slope of log(y) against log(p) for p = 1..n.
double growth_exponent(const std::vector<double>& y) {
  const int n = static_cast<int>(y.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    double x = std::log(double(i + 1)), ly = std::log(y[i]);
    sx += x;
    sy += ly;
    sxx += x * x;
    sxy += x * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

struct Run {
  Mesh mesh;
  MaterialModel mat;
  Manufactured problem;
  BrokenField E_h;
};

Run solve_case(const Mesh& mesh, const std::string& name, int p,
               double eta_star) {
  Run r{mesh, MaterialModel::constant(mesh, 1.0, 1.0, 1.0),
        manufactured_case(name, 1.0), BrokenField()};
  DGConfig cfg;
  cfg.p = p;
  cfg.eta_star = eta_star;
  r.E_h = solve(assemble(r.mesh, r.mat, cfg, r.problem.source));
  return r;
}

void criterion_1_exactness() {
  double worst_err = 0.0, worst_eta = 0.0;
  for (int n : {2, 4})
    for (int p : {2, 3}) {
      Run r = solve_case(uniform_square_mesh(n), "poly2", p, -1.0);
      IndicatorReport rep =
          compute_indicators(r.E_h, r.mat, r.problem.source, &r.problem.exact);
      worst_err = std::max(worst_err, rep.err_total);
      worst_eta = std::max(worst_eta, rep.total);
    }
  report("01-discrete-exactness", worst_err <= 1e-7 && worst_eta <= 1e-7,
         "err " + fmt(worst_err) + ", eta " + fmt(worst_eta));
}

void criterion_2_coercivity() {
  Mesh mesh = uniform_square_mesh(2);
  MaterialModel mat = MaterialModel::constant(mesh, 1.0, 1.0, 1.0);
  double worst = 1e300;
  for (int p = 1; p <= 3; ++p) {
    DGConfig cfg;
    cfg.p = p;  // eta_star automatic
    worst = std::min(worst, coercivity_check(mesh, mat, cfg, 100));
  }
  report("02-coercivity", worst >= 0.5 - 1e-10, "min ratio " + fmt(worst));
}

void criterion_3_h_convergence() {
  bool ok = true;
  std::string detail;
  for (int p : {1, 2}) {
    std::vector<double> errs, etas, effs;
    for (int lvl = 0; lvl < 4; ++lvl) {
      Run r = solve_case(uniform_square_mesh(2 << lvl), "trig", p, 20.0);
      IndicatorReport rep =
          compute_indicators(r.E_h, r.mat, r.problem.source, &r.problem.exact);
      errs.push_back(rep.err_total);
      etas.push_back(rep.total);
      effs.push_back(rep.effectivity);
    }
    double rate_err = std::log2(errs[2] / errs[3]);
    double rate_eta = std::log2(etas[2] / etas[3]);
    ok = ok && std::abs(rate_err - p) <= 0.2 &&
         std::abs(rate_eta - rate_err) <= 0.2 && variation(effs) < 0.5;
    detail += "p=" + std::to_string(p) + ": rate " + fmt(rate_err) + ", eta rate " +
              fmt(rate_eta) + ", eff spread " + fmt(variation(effs)) + "; ";
  }
  report("03-h-convergence", ok, detail);
}

void criterion_4_conformity() {
  std::mt19937_64 rng(4242);
  double worst = 0.0;
  for (Mesh mesh : {uniform_square_mesh(2), l_shape_mesh(1)}) {
    for (int s = 0; s < 20; ++s) {
      int p = s % 4;
      BrokenField v = random_field(mesh, p, 2, rng);
      worst = std::max(worst, conformity_defect(reconstruct(v, p + 2)));
    }
  }
  report("04-reconstruction-conformity", worst <= 1e-10, "max defect " + fmt(worst));
}

void criterion_5_ratio_h_uniformity() {
  std::vector<double> rc, rl;
  for (int n : {4, 8, 16}) {
    Run r = solve_case(uniform_square_mesh(n), "trig", 2, 20.0);
    ConformingField E_c = reconstruct(r.E_h, 4);
    TheoremRatios tr = theorem_ratios(r.E_h, E_c);
    rc.push_back(tr.ratio_curl);
    rl.push_back(tr.ratio_l2);
  }
  bool ok = variation(rc) < 0.25 && variation(rl) < 0.25;
  report("05-ratio-h-uniformity", ok,
         "curl spread " + fmt(variation(rc)) + ", L2 spread " + fmt(variation(rl)));
}

void criterion_6_ratio_p_growth() {
  std::vector<double> rc, rl;
  for (int p = 1; p <= 4; ++p) {
    Run r = solve_case(uniform_square_mesh(4), "trig", p, 20.0);
    ConformingField E_c = reconstruct(r.E_h, p + 2);
    TheoremRatios tr = theorem_ratios(r.E_h, E_c);
    rc.push_back(tr.ratio_curl);
    rl.push_back(tr.ratio_l2);
  }
  double ec = growth_exponent(rc), el = growth_exponent(rl);
  report("06-ratio-p-growth", ec <= 0.75 && el <= 0.75,
         "curl exponent " + fmt(ec) + ", L2 exponent " + fmt(el));
}

void criterion_7_poincare() {
  bool ok = true;
  std::string detail;
  for (int p = 1; p <= 3; ++p) {
    std::vector<double> level_max;
    for (int lvl = 0; lvl < 3; ++lvl) {
      Run r = solve_case(uniform_square_mesh(2 << lvl), "trig", p, 20.0);
      double pmax = 0.0;
      for (int a = 0; a < r.mesh.num_vertices(); ++a) {
        VertexPatch patch = vertex_patch(r.mesh, a);
        PoincareResult pr = poincare_ratio(r.mesh, patch, r.E_h, p + 2);
        if (!pr.conforming) pmax = std::max(pmax, pr.ratio);
      }
      level_max.push_back(pmax);
    }
    ok = ok && variation(level_max) < 0.25;
    detail += "p=" + std::to_string(p) + " spread " + fmt(variation(level_max)) + "; ";
  }
  report("07-poincare", ok, detail);
}

void criterion_8_trace_and_lifting() {
  Mesh coarse = uniform_square_mesh(2);
  Mesh fine = uniform_square_mesh(4);
  MaterialModel mc = MaterialModel::constant(coarse, 1.0, 1.0, 1.0);
  MaterialModel mf = MaterialModel::constant(fine, 1.0, 1.0, 1.0);
  double tp = 0.0, th = 0.0, lp = 0.0, lh = 0.0;
  double tbase = trace_inequality_ratio(coarse, 1);
  double lbase = measure_lifting_constant(coarse, mc, 1);
  for (int p = 1; p <= 4; ++p) {
    double t = trace_inequality_ratio(coarse, p);
    double tf = trace_inequality_ratio(fine, p);
    tp = std::max(tp, t / tbase);
    th = std::max(th, std::max(t / tf, tf / t));
    double l = measure_lifting_constant(coarse, mc, p);
    double lf = measure_lifting_constant(fine, mf, p);
    lp = std::max(lp, l / lbase);
    lh = std::max(lh, std::max(l / lf, lf / l));
  }
  bool ok = tp <= 1.3 && th <= 1.3 && lp <= 1.3 && lh <= 1.3;
  report("08-trace-and-lifting-constants", ok,
         "trace p " + fmt(tp) + " h " + fmt(th) + ", lifting p " + fmt(lp) +
             " h " + fmt(lh));
}

void criterion_9_local_efficiency() {
  // h-stability at fixed p
  std::vector<double> level_worst;
  for (int n : {2, 4, 8}) {
    Run r = solve_case(uniform_square_mesh(n), "trig", 1, 20.0);
    IndicatorReport rep =
        compute_indicators(r.E_h, r.mat, r.problem.source, &r.problem.exact);
    level_worst.push_back(local_efficiency_ratios(r.mesh, rep).maxCoeff());
  }
  bool ok = max_of(level_worst) <= 2.0 * min_of(level_worst);
  // p-growth bounded by 1.5 p^{3/2}
  std::vector<double> p_worst;
  for (int p = 1; p <= 4; ++p) {
    Run r = solve_case(uniform_square_mesh(4), "trig", p, 20.0);
    IndicatorReport rep =
        compute_indicators(r.E_h, r.mat, r.problem.source, &r.problem.exact);
    p_worst.push_back(local_efficiency_ratios(r.mesh, rep).maxCoeff());
  }
  for (int p = 2; p <= 4; ++p)
    ok = ok && p_worst[p - 1] <= 1.5 * std::pow(double(p), 1.5) * p_worst[0];
  report("09-local-efficiency", ok,
         "level spread " + fmt(max_of(level_worst) / min_of(level_worst)) +
             ", p growth " + fmt(p_worst[3] / p_worst[0]));
}

void criterion_10_helmholtz() {
  Mesh mesh = uniform_square_mesh(2);
  std::mt19937_64 rng(777);
  std::uniform_int_distribution<int> vdist(0, mesh.num_vertices() - 1);
  std::uniform_int_distribution<int> pdist(0, 3);
  double worst = 0.0;
  for (int s = 0; s < 50; ++s) {
    int p = pdist(rng);
    BrokenField v = random_field(mesh, p, 2, rng);
    VertexPatch patch = vertex_patch(mesh, vdist(rng));
    worst = std::max(worst, helmholtz_check(mesh, patch, v, p + 2).defect);
  }
  report("10-helmholtz-defect", worst <= 1e-10, "max defect " + fmt(worst));
}

void criterion_11_determinism() {
  auto run_twice = [](RunConfig cfg, const std::string& tag) {
    std::vector<std::string> dumps;
    for (int rep = 0; rep < 2; ++rep) {
      fs::path dir = fs::temp_directory_path() /
                     ("curlrec_accept_" + tag + (rep ? "_b" : "_a"));
      fs::remove_all(dir);
      fs::create_directories(dir);
      cfg.out_dir = dir.string();
      cli_run(cfg);
      std::string all;
      std::vector<fs::path> files;
      for (const auto& e : fs::directory_iterator(dir)) files.push_back(e.path());
      std::sort(files.begin(), files.end());
      for (const fs::path& f : files) {
        std::ifstream in(f);
        std::stringstream ss;
        ss << in.rdbuf();
        all += f.filename().string() + "\n" + ss.str();
      }
      dumps.push_back(all);
    }
    return dumps[0] == dumps[1];
  };
  RunConfig study;
  study.command = "study-h";
  study.square = 2;
  study.levels = 2;
  study.p = 1;
  RunConfig verify;
  verify.command = "verify";
  verify.square = 2;
  // silence the verify console output for the repeat comparison
  std::streambuf* old = std::cout.rdbuf();
  std::ostringstream sink;
  std::cout.rdbuf(sink.rdbuf());
  bool ok_v = run_twice(verify, "verify");
  std::cout.rdbuf(old);
  bool ok_s = run_twice(study, "study");
  report("11-determinism", ok_s && ok_v,
         std::string("study-h ") + (ok_s ? "stable" : "drifted") + ", verify " +
             (ok_v ? "stable" : "drifted"));
}

}  // namespace

int main() {
  criterion_1_exactness();
  criterion_2_coercivity();
  criterion_3_h_convergence();
  criterion_4_conformity();
  criterion_5_ratio_h_uniformity();
  criterion_6_ratio_p_growth();
  criterion_7_poincare();
  criterion_8_trace_and_lifting();
  criterion_9_local_efficiency();
  criterion_10_helmholtz();
  criterion_11_determinism();
  std::cout << (failures == 0 ? "ALL CRITERIA PASSED"
                              : std::to_string(failures) + " CRITERIA FAILED")
            << '\n';
  return failures == 0 ? 0 : 1;
}
