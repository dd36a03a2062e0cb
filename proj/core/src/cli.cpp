// SPDX-License-Identifier: Apache-2.0
#include "curlrec/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "curlrec/io.hpp"

namespace curlrec {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string effective_solution(const RunConfig& cfg) {
  if (cfg.lshape > 0 && cfg.mesh_file.empty() && cfg.square < 0) return "lshape";
  return cfg.solution;
}

/// Mesh for refinement level `level` (level 0 = base). Structured families
/// are regenerated with doubled resolution so that h halves per level; file
/// meshes get two bisection sweeps per level (same h halving).
Mesh level_mesh(const RunConfig& cfg, int level) {
  if (!cfg.mesh_file.empty()) {
    Mesh m = read_mesh_file(cfg.mesh_file);
    for (int l = 0; l < 2 * level; ++l) {
      std::vector<int> all(m.num_cells());
      for (int k = 0; k < m.num_cells(); ++k) all[k] = k;
      m = refine(m, all);
    }
    return m;
  }
  if (cfg.lshape > 0) return l_shape_mesh(cfg.lshape << level);
  int n = cfg.square > 0 ? cfg.square : 2;
  return uniform_square_mesh(n << level);
}

void write_meta(std::ostream& os, const RunConfig& cfg) {
  os << "# config command=" << cfg.command << " mesh="
     << (!cfg.mesh_file.empty()
             ? cfg.mesh_file
             : (cfg.lshape > 0 ? "lshape:" + std::to_string(cfg.lshape)
                               : "square:" + std::to_string(cfg.square > 0 ? cfg.square : 2)))
     << " solution=" << effective_solution(cfg) << " p=" << cfg.p
     << " q=" << cfg.resolved_q() << " omega=" << cfg.omega
     << " eps=" << cfg.eps << " nu=" << cfg.nu << " eta_star=" << cfg.eta_star
     << " levels=" << cfg.levels << " theta=" << cfg.theta
     << " seed=" << cfg.seed << " version=0.1.0\n";
}

std::ofstream open_out(const RunConfig& cfg, const std::string& name) {
  std::filesystem::create_directories(cfg.out_dir);
  std::ofstream os(std::filesystem::path(cfg.out_dir) / name);
  if (!os) throw ConfigError("cannot open output file: " + name);
  os.precision(17);
  return os;
}

struct Pipeline {
  Manufactured problem;
  MaterialModel mat;
  DGSystem system;
  BrokenField E_h;
};

Pipeline run_pipeline(const RunConfig& cfg, const Mesh& mesh) {
  Pipeline pl;
  pl.problem = manufactured_case(effective_solution(cfg), cfg.omega);
  pl.mat = MaterialModel::constant(mesh, cfg.eps, cfg.nu, cfg.omega);
  DGConfig dc;
  dc.p = cfg.p;
  dc.eta_star = cfg.eta_star;
  pl.system = assemble(mesh, pl.mat, dc, pl.problem.source);
  pl.E_h = solve(pl.system);
  return pl;
}

int run_solve(const RunConfig& cfg) {
  Mesh mesh = level_mesh(cfg, 0);
  Pipeline pl = run_pipeline(cfg, mesh);
  auto fs = open_out(cfg, "solution.field");
  write_field(fs, pl.E_h);
  auto ms = open_out(cfg, "mesh.txt");
  write_mesh(ms, mesh);
  std::cout << "solve: cells=" << mesh.num_cells()
            << " ndof=" << pl.E_h.coeffs().size()
            << " eta_star=" << pl.system.config.eta_star;
  if (pl.problem.has_exact) {
    ErrorMeasure em = error_measure(pl.problem.exact, pl.E_h, pl.mat, cfg.p);
    std::cout << " err_sharp=" << em.total;
  }
  std::cout << '\n';
  return 0;
}

int run_estimate(const RunConfig& cfg) {
  Mesh mesh = level_mesh(cfg, 0);
  Pipeline pl = run_pipeline(cfg, mesh);
  IndicatorReport rep =
      compute_indicators(pl.E_h, pl.mat, pl.problem.source,
                         pl.problem.has_exact ? &pl.problem.exact : nullptr);
  auto os = open_out(cfg, "indicators.csv");
  write_indicator_csv(os, rep);
  write_meta(os, cfg);
  std::cout << "estimate: eta=" << rep.total;
  if (rep.has_error)
    std::cout << " err_sharp=" << rep.err_total << " effectivity="
              << (rep.exact_flag ? std::string("exact")
                                 : std::to_string(rep.effectivity));
  std::cout << '\n';
  return 0;
}

int run_reconstruct(const RunConfig& cfg) {
  Mesh mesh = level_mesh(cfg, 0);
  Pipeline pl = run_pipeline(cfg, mesh);
  ConformingField E_c = reconstruct(pl.E_h, cfg.resolved_q());
  auto os = open_out(cfg, "reconstruction.field");
  write_conforming(os, E_c);
  TheoremRatios tr = theorem_ratios(pl.E_h, E_c);
  std::cout << "reconstruct: q=" << cfg.resolved_q()
            << " conformity_defect=" << conformity_defect(E_c);
  if (tr.conforming_input)
    std::cout << " ratios=conforming-input";
  else
    std::cout << " ratio_curl=" << tr.ratio_curl
              << " ratio_l2=" << tr.ratio_l2;
  std::cout << '\n';
  return 0;
}

int run_study_h(const RunConfig& cfg) {
  auto os = open_out(cfg, "study_h.csv");
  os << "level,h_max,ndof,err_sharp,eta,eta_div,eta_curl,eta_nc,effectivity,"
        "ratio_curl,ratio_L2,rate_err,rate_eta\n";
  double prev_err = -1.0, prev_eta = -1.0;
  for (int level = 0; level < cfg.levels; ++level) {
    Mesh mesh = level_mesh(cfg, level);
    Pipeline pl = run_pipeline(cfg, mesh);
    IndicatorReport rep =
        compute_indicators(pl.E_h, pl.mat, pl.problem.source,
                           pl.problem.has_exact ? &pl.problem.exact : nullptr);
    ConformingField E_c = reconstruct(pl.E_h, cfg.resolved_q());
    TheoremRatios tr = theorem_ratios(pl.E_h, E_c);

    os << level << ',' << mesh.h_max << ',' << pl.E_h.coeffs().size() << ',';
    if (rep.has_error) os << rep.err_total;
    os << ',' << rep.total << ',' << rep.total_div << ',' << rep.total_curl
       << ',' << rep.total_nc << ',';
    if (rep.has_error) {
      if (rep.exact_flag)
        os << "exact";
      else
        os << rep.effectivity;
    }
    os << ',';
    if (!tr.conforming_input) os << tr.ratio_curl;
    os << ',';
    if (!tr.conforming_input) os << tr.ratio_l2;
    os << ',';
    if (rep.has_error && prev_err > 0.0 && rep.err_total > 0.0)
      os << std::log2(prev_err / rep.err_total);
    os << ',';
    if (prev_eta > 0.0 && rep.total > 0.0) os << std::log2(prev_eta / rep.total);
    os << '\n';
    prev_err = rep.has_error ? rep.err_total : -1.0;
    prev_eta = rep.total;
  }
  write_meta(os, cfg);
  return 0;
}

int run_study_p(const RunConfig& cfg) {
  auto os = open_out(cfg, "study_p.csv");
  os << "p,ndof,err_sharp,eta,effectivity,ratio_curl,ratio_L2\n";
  const int p_max = cfg.p >= 2 ? cfg.p : 4;
  Mesh mesh = level_mesh(cfg, 0);
  for (int p = 1; p <= p_max; ++p) {
    RunConfig sub = cfg;
    sub.p = p;
    sub.q = cfg.q >= 0 ? cfg.q : p + 2;
    Pipeline pl = run_pipeline(sub, mesh);
    IndicatorReport rep =
        compute_indicators(pl.E_h, pl.mat, pl.problem.source,
                           pl.problem.has_exact ? &pl.problem.exact : nullptr);
    ConformingField E_c = reconstruct(pl.E_h, sub.resolved_q());
    TheoremRatios tr = theorem_ratios(pl.E_h, E_c);
    os << p << ',' << pl.E_h.coeffs().size() << ',';
    if (rep.has_error) os << rep.err_total;
    os << ',' << rep.total << ',';
    if (rep.has_error) {
      if (rep.exact_flag)
        os << "exact";
      else
        os << rep.effectivity;
    }
    os << ',';
    if (!tr.conforming_input) os << tr.ratio_curl;
    os << ',';
    if (!tr.conforming_input) os << tr.ratio_l2;
    os << '\n';
  }
  write_meta(os, cfg);
  return 0;
}

/// Smallest cell set with sum of squared indicators >= theta^2 times the
/// total, ties broken by cell index.
std::vector<int> dorfler_mark(const Eigen::VectorXd& eta, double theta) {
  std::vector<int> order(eta.size());
  for (int i = 0; i < eta.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (eta[a] != eta[b]) return eta[a] > eta[b];
    return a < b;
  });
  double total = eta.squaredNorm();
  double acc = 0.0;
  std::vector<int> marked;
  for (int k : order) {
    if (acc >= theta * theta * total && !marked.empty()) break;
    marked.push_back(k);
    acc += eta[k] * eta[k];
  }
  std::sort(marked.begin(), marked.end());
  return marked;
}

int run_adapt(const RunConfig& cfg) {
  auto os = open_out(cfg, "adapt.csv");
  os << "iter,ndof,eta,err_sharp\n";
  std::vector<std::unique_ptr<Mesh>> meshes;
  meshes.push_back(std::make_unique<Mesh>(level_mesh(cfg, 0)));
  for (int iter = 0; iter < cfg.levels; ++iter) {
    const Mesh& mesh = *meshes.back();
    Pipeline pl = run_pipeline(cfg, mesh);
    IndicatorReport rep =
        compute_indicators(pl.E_h, pl.mat, pl.problem.source,
                           pl.problem.has_exact ? &pl.problem.exact : nullptr);
    os << iter << ',' << pl.E_h.coeffs().size() << ',' << rep.total << ',';
    if (rep.has_error) os << rep.err_total;
    os << '\n';
    if (iter + 1 < cfg.levels) {
      std::vector<int> marked = dorfler_mark(rep.eta_total, cfg.theta);
      meshes.push_back(std::make_unique<Mesh>(refine(mesh, marked)));
    }
  }
  write_meta(os, cfg);
  auto ms = open_out(cfg, "mesh_final.txt");
  write_mesh(ms, *meshes.back());
  return 0;
}

struct VerifyReport {
  std::ostream& console;
  std::ofstream file;
  bool all_ok = true;

  void check(const std::string& name, bool ok, double value) {
    all_ok = all_ok && ok;
    std::ostringstream line;
    line.precision(12);
    line << (ok ? "PASS " : "FAIL ") << name << " (" << value << ")";
    console << line.str() << '\n';
    file << line.str() << '\n';
  }
};

int run_verify(const RunConfig& cfg) {
  VerifyReport rep{std::cout, open_out(cfg, "verify.txt")};
  std::mt19937_64 rng(cfg.seed);
  Mesh mesh = level_mesh(cfg, 0);

  {  // barycentric partition of unity at random points
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> cell_dist(0, mesh.num_cells() - 1);
    double worst = 0.0;
    for (int s = 0; s < 1000; ++s) {
      int k = cell_dist(rng);
      double a = u(rng), b = u(rng);
      if (a + b > 1.0) {
        a = 1.0 - a;
        b = 1.0 - b;
      }
      const auto& c = mesh.cells[k];
      Vec2 x = (1.0 - a - b) * mesh.vertices[c[0]] + a * mesh.vertices[c[1]] +
               b * mesh.vertices[c[2]];
      worst = std::max(worst, std::abs(mesh.barycentric(k, x).sum() - 1.0));
    }
    rep.check("partition-of-unity", worst <= 1e-13, worst);
  }

  {  // cellwise integration by parts: (curl v, phi) - (v, rot phi) - boundary
    BrokenField v = random_field(mesh, 3, 2, rng);
    BrokenField phi = random_field(mesh, 3, 1, rng);
    BrokenField cv = curl_h(v);
    BrokenField rphi = rot_scalar(phi);
    const int np = edge_points(3);
    double worst = 0.0;
    for (int k = 0; k < mesh.num_cells(); ++k) {
      double t1 = 0.0, t2 = 0.0, t3 = 0.0;
      CellQuad q = cell_quadrature(mesh, k, 10);
      for (int i = 0; i < q.points.rows(); ++i) {
        Vec2 x = q.points.row(i);
        t1 += q.weights[i] * cv.eval_scalar(k, x) * phi.eval_scalar(k, x);
        t2 += q.weights[i] * v.eval_vector(k, x).dot(rphi.eval_vector(k, x));
      }
      for (const auto& [e, sign] : mesh.cell_edges[k]) {
        EdgeQuad eq = edge_quadrature(mesh, e, np);
        Eigen::VectorXd tr = tangential_trace(v, k, e, np);
        for (int i = 0; i < np; ++i)
          t3 += sign * eq.weights[i] * tr[i] *
                phi.eval_scalar(k, eq.points.row(i));
      }
      worst = std::max(worst, std::abs(t1 - t2 - t3));
    }
    rep.check("integration-by-parts", worst <= 1e-10, worst);
  }

  {  // trace-inequality constant: p-uniform and h-uniform
    Mesh fine = level_mesh(cfg, 1);
    double base = trace_inequality_ratio(mesh, 1);
    double worst_p = 0.0, worst_h = 0.0;
    for (int p = 1; p <= 4; ++p) {
      double c = trace_inequality_ratio(mesh, p);
      double cf = trace_inequality_ratio(fine, p);
      worst_p = std::max(worst_p, c / base);
      worst_h = std::max(worst_h, std::max(cf / c, c / cf));
    }
    rep.check("trace-inequality-p-uniform", worst_p <= 1.3, worst_p);
    rep.check("trace-inequality-h-uniform", worst_h <= 1.3, worst_h);
  }

  {  // lifting-bound constant: p-uniform and h-uniform
    Mesh fine = level_mesh(cfg, 1);
    MaterialModel mc = MaterialModel::constant(mesh, cfg.eps, cfg.nu, cfg.omega);
    MaterialModel mf = MaterialModel::constant(fine, cfg.eps, cfg.nu, cfg.omega);
    double base = measure_lifting_constant(mesh, mc, 1);
    double worst_p = 0.0, worst_h = 0.0;
    for (int p = 1; p <= 4; ++p) {
      double c = measure_lifting_constant(mesh, mc, p);
      double cf = measure_lifting_constant(fine, mf, p);
      worst_p = std::max(worst_p, c / base);
      worst_h = std::max(worst_h, std::max(cf / c, c / cf));
    }
    rep.check("lifting-bound-p-uniform", worst_p <= 1.3, worst_p);
    rep.check("lifting-bound-h-uniform", worst_h <= 1.3, worst_h);
  }

  {  // coercivity with automatic penalty parameter
    MaterialModel mat = MaterialModel::constant(mesh, cfg.eps, cfg.nu, cfg.omega);
    double worst = 1e300;
    for (int p = 1; p <= 3; ++p) {
      DGConfig dc;
      dc.p = p;
      dc.eta_star = cfg.eta_star;
      worst = std::min(worst, coercivity_check(mesh, mat, dc, 100));
    }
    rep.check("coercivity", worst >= 0.5 - 1e-10, worst);
  }

  {  // Helmholtz orthogonality defect on random patch fields
    std::uniform_int_distribution<int> vdist(0, mesh.num_vertices() - 1);
    std::uniform_int_distribution<int> pdist(0, 3);
    double worst = 0.0;
    for (int s = 0; s < 50; ++s) {
      int a = vdist(rng);
      int p = pdist(rng);
      BrokenField v = random_field(mesh, p, 2, rng);
      VertexPatch patch = vertex_patch(mesh, a);
      HelmholtzResult hr = helmholtz_check(mesh, patch, v, p + 2);
      worst = std::max(worst, hr.defect);
    }
    rep.check("helmholtz-defect", worst <= 1e-10, worst);
  }

  {  // conformity of the reconstruction on random broken fields
    double worst = 0.0;
    for (int s = 0; s < 20; ++s) {
      int p = s % 4;
      BrokenField v = random_field(mesh, p, 2, rng);
      ConformingField rc = reconstruct(v, p + 2);
      worst = std::max(worst, conformity_defect(rc));
    }
    rep.check("reconstruction-conformity", worst <= 1e-10, worst);
  }

  auto variation = [](const std::vector<double>& v) {
    double lo = *std::min_element(v.begin(), v.end());
    double hi = *std::max_element(v.begin(), v.end());
    return lo > 0.0 ? hi / lo - 1.0 : 0.0;
  };

  {  // Poincare ratio across uniform levels (p = 1)
    std::vector<double> pmax_level;
    for (int level = 0; level < 3; ++level) {
      Mesh lm = level_mesh(cfg, level);
      RunConfig sub = cfg;
      sub.p = 1;
      Pipeline pl = run_pipeline(sub, lm);
      double pmax = 0.0;
      for (int a = 0; a < lm.num_vertices(); ++a) {
        VertexPatch patch = vertex_patch(lm, a);
        PoincareResult pr = poincare_ratio(lm, patch, pl.E_h, 3);
        if (!pr.conforming) pmax = std::max(pmax, pr.ratio);
      }
      pmax_level.push_back(pmax);
    }
    rep.check("poincare-h-uniform", variation(pmax_level) < 0.25,
              variation(pmax_level));
  }

  {  // Reconstruction bound ratios across uniform levels at fixed p = 2.
    // Levels start one refinement above the base mesh: on the coarsest mesh
    // the ratios are still in their preasymptotic transient.
    std::vector<double> rcurl_level, rl2_level;
    for (int level = 1; level < 4; ++level) {
      Mesh lm = level_mesh(cfg, level);
      RunConfig sub = cfg;
      sub.p = 2;
      // Pin the penalty so the discretization is identical across levels;
      // the automatic eta_star re-measures per mesh and would perturb the
      // jump magnitudes between levels.
      sub.eta_star = 20.0;
      Pipeline pl = run_pipeline(sub, lm);
      ConformingField E_c = reconstruct(pl.E_h, 4);
      TheoremRatios tr = theorem_ratios(pl.E_h, E_c);
      rcurl_level.push_back(tr.ratio_curl);
      rl2_level.push_back(tr.ratio_l2);
    }
    rep.check("theorem-ratio-curl-h-uniform", variation(rcurl_level) < 0.25,
              variation(rcurl_level));
    rep.check("theorem-ratio-l2-h-uniform", variation(rl2_level) < 0.25,
              variation(rl2_level));
  }

  return rep.all_ok ? 0 : 1;
}

}  // namespace

void RunConfig::validate() const {
  static const char* commands[] = {"solve",   "estimate", "reconstruct",
                                   "study-h", "study-p",  "adapt",
                                   "verify"};
  bool known = false;
  for (const char* c : commands) known = known || command == c;
  if (!known) throw ConfigError("unknown command: " + command);
  if (p < 0) throw ConfigError("p must be >= 0");
  if (q >= 0 && q < p + 1) throw ConfigError("q must be >= p + 1");
  if (omega <= 0 || eps <= 0 || nu <= 0)
    throw ConfigError("omega, eps, nu must be positive");
  if (levels < 1) throw ConfigError("levels must be >= 1");
  if (theta <= 0.0 || theta > 1.0) throw ConfigError("theta must be in (0, 1]");
  if (square == 0 || lshape == 0)
    throw ConfigError("mesh parameters must be positive");
  if (solution != "poly2" && solution != "trig" && solution != "lshape")
    throw ConfigError("unknown manufactured case: " + solution);
}

void apply_config_entry(RunConfig& cfg, const std::string& key,
                        const std::string& value) {
  try {
    if (key == "command")
      cfg.command = value;
    else if (key == "mesh")
      cfg.mesh_file = value;
    else if (key == "square")
      cfg.square = std::stoi(value);
    else if (key == "lshape")
      cfg.lshape = std::stoi(value);
    else if (key == "p")
      cfg.p = std::stoi(value);
    else if (key == "q")
      cfg.q = std::stoi(value);
    else if (key == "omega")
      cfg.omega = std::stod(value);
    else if (key == "eps")
      cfg.eps = std::stod(value);
    else if (key == "nu")
      cfg.nu = std::stod(value);
    else if (key == "eta_star")
      cfg.eta_star = std::stod(value);
    else if (key == "levels")
      cfg.levels = std::stoi(value);
    else if (key == "theta")
      cfg.theta = std::stod(value);
    else if (key == "seed")
      cfg.seed = std::stoul(value);
    else if (key == "out")
      cfg.out_dir = value;
    else if (key == "solution")
      cfg.solution = value;
    else
      throw ConfigError("unknown config key: " + key);
  } catch (const std::invalid_argument&) {
    throw ConfigError("bad value for config key " + key + ": " + value);
  } catch (const std::out_of_range&) {
    throw ConfigError("bad value for config key " + key + ": " + value);
  }
}

RunConfig load_config_file(const std::string& path, RunConfig base) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file: " + path);
  std::string text;
  int line = 0;
  while (std::getline(is, text)) {
    ++line;
    auto pos = text.find('#');
    if (pos != std::string::npos) text.erase(pos);
    if (trim(text).empty()) continue;
    auto eq = text.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line) +
                        ": expected `key = value`");
    apply_config_entry(base, trim(text.substr(0, eq)),
                       trim(text.substr(eq + 1)));
  }
  return base;
}

int cli_run(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.command == "solve") return run_solve(cfg);
  if (cfg.command == "estimate") return run_estimate(cfg);
  if (cfg.command == "reconstruct") return run_reconstruct(cfg);
  if (cfg.command == "study-h") return run_study_h(cfg);
  if (cfg.command == "study-p") return run_study_p(cfg);
  if (cfg.command == "adapt") return run_adapt(cfg);
  return run_verify(cfg);
}

}  // namespace curlrec
