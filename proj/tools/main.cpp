// SPDX-License-Identifier: Apache-2.0
//
// Command-line driver: solve / estimate / reconstruct pipelines, convergence
// studies, adaptive loop, and the inequality-verification suite.

#include <iostream>

#include <CLI11.hpp>

#include "curlrec/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"H0(curl) reconstruction and a posteriori error estimation "
               "for an interior-penalty dG Maxwell solver"};
  app.require_subcommand(1);

  curlrec::RunConfig cli;  // values set on the command line
  std::string config_file;

  std::vector<CLI::App*> subs;
  for (const char* name : {"solve", "estimate", "reconstruct", "study-h",
                           "study-p", "adapt", "verify"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--mesh", cli.mesh_file, "mesh file (plain-text format)");
    sub->add_option("--square", cli.square, "structured unit-square mesh, n");
    sub->add_option("--lshape", cli.lshape, "structured L-shape mesh, n");
    sub->add_option("--p", cli.p, "discretization degree");
    sub->add_option("--q", cli.q, "reconstruction degree (default p+2)");
    sub->add_option("--omega", cli.omega, "frequency");
    sub->add_option("--eta-star", cli.eta_star,
                    "penalty parameter (default: automatic)");
    sub->add_option("--levels", cli.levels, "refinement levels / iterations");
    sub->add_option("--theta", cli.theta, "marking fraction");
    sub->add_option("--seed", cli.seed, "random seed");
    sub->add_option("--out", cli.out_dir, "output directory");
    sub->add_option("--config", config_file, "key = value config file");
    sub->add_option("--solution", cli.solution,
                    "manufactured case: poly2 | trig | lshape");
    subs.push_back(sub);
  }

  CLI11_PARSE(app, argc, argv);
  CLI::App* sub = app.get_subcommands().front();

  try {
    curlrec::RunConfig cfg;
    if (!config_file.empty()) cfg = curlrec::load_config_file(config_file, cfg);
    cfg.command = sub->get_name();
    // command-line flags override config-file values
    auto passed = [&](const std::string& flag) {
      return sub->count(flag) > 0;
    };
    if (passed("--mesh")) cfg.mesh_file = cli.mesh_file;
    if (passed("--square")) cfg.square = cli.square;
    if (passed("--lshape")) cfg.lshape = cli.lshape;
    if (passed("--p")) cfg.p = cli.p;
    if (passed("--q")) cfg.q = cli.q;
    if (passed("--omega")) cfg.omega = cli.omega;
    if (passed("--eta-star")) cfg.eta_star = cli.eta_star;
    if (passed("--levels")) cfg.levels = cli.levels;
    if (passed("--theta")) cfg.theta = cli.theta;
    if (passed("--seed")) cfg.seed = cli.seed;
    if (passed("--out")) cfg.out_dir = cli.out_dir;
    if (passed("--solution")) cfg.solution = cli.solution;
    return curlrec::cli_run(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
