// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "curlrec/estimator.hpp"
#include "curlrec/manufactured.hpp"

using namespace curlrec;

TEST_CASE("divergence indicator for the zero field and J = (x, 0)") {
  // with E_h = 0 the edge jump term vanishes and div J = 1, so
  // eta_div,K = (h_K / p) sqrt(|K|) for omega = eps = 1
  Mesh m = uniform_square_mesh(2);
  MaterialModel mat = MaterialModel::constant(m, 1.0, 1.0, 1.0);
  SourceTerm src{[](const Vec2& x) { return Vec2(x.x(), 0.0); },
                 ScalarFn([](const Vec2&) { return 1.0; })};
  BrokenField zero(m, 1, 2);
  for (int k = 0; k < m.num_cells(); ++k) {
    double expect = m.cell_diameter[k] * std::sqrt(m.cell_area[k]);
    CHECK(eta_div(zero, mat, src, k) == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("divergence indicator falls back to a projected divergence") {
  Mesh m = uniform_square_mesh(2);
  MaterialModel mat = MaterialModel::constant(m, 1.0, 1.0, 1.0);
  BrokenField zero(m, 2, 2);
  SourceTerm with{[](const Vec2& x) { return Vec2(x.x() * x.y(), x.y()); },
                  ScalarFn([](const Vec2& x) { return x.y() + 1.0; })};
  SourceTerm without{with.J, std::nullopt};
  for (int k = 0; k < m.num_cells(); ++k)
    CHECK(eta_div(zero, mat, with, k) ==
          doctest::Approx(eta_div(zero, mat, without, k)).epsilon(1e-10));
}

TEST_CASE("indicators scale linearly in the residual data") {
  Mesh m = uniform_square_mesh(2);
  MaterialModel mat = MaterialModel::constant(m, 1.0, 1.0, 1.0);
  Manufactured prob = manufactured_case("trig", 1.0);
  DGConfig cfg;
  cfg.p = 1;
  cfg.eta_star = 20.0;
  BrokenField E = solve(assemble(m, mat, cfg, prob.source));
  BrokenField E2 = E;
  E2.coeffs() *= 3.0;
  SourceTerm src3{[&](const Vec2& x) { return Vec2(3.0 * prob.source.J(x)); },
                  ScalarFn([&](const Vec2& x) { return 3.0 * (*prob.source.div_J)(x); })};
  for (int k = 0; k < m.num_cells(); ++k) {
    CHECK(eta_div(E2, mat, src3, k) ==
          doctest::Approx(3.0 * eta_div(E, mat, prob.source, k)).epsilon(1e-10));
    CHECK(eta_curl(E2, mat, src3, k) ==
          doctest::Approx(3.0 * eta_curl(E, mat, prob.source, k)).epsilon(1e-10));
    CHECK(eta_nc(E2, mat, k) ==
          doctest::Approx(3.0 * eta_nc(E, mat, k)).epsilon(1e-10));
  }
}

TEST_CASE("nonconformity indicator vanishes for a conforming interpolant") {
  Mesh m = uniform_square_mesh(2);
  MaterialModel mat = MaterialModel::constant(m, 1.0, 1.0, 1.0);
  BrokenField conf = l2_project(
      m, VectorFn([](const Vec2& x) {
        return Vec2(x.y() * (1 - x.y()), x.x() * (1 - x.x()));
      }),
      2);
  for (int k = 0; k < m.num_cells(); ++k)
    CHECK(eta_nc(conf, mat, k) <= 1e-12);
}

TEST_CASE("exact quadratic run: all indicators at rounding level, exact flag") {
  Manufactured prob = manufactured_case("poly2", 1.0);
  Mesh m = uniform_square_mesh(2);
  MaterialModel mat = MaterialModel::constant(m, 1.0, 1.0, 1.0);
  DGConfig cfg;
  cfg.p = 2;
  BrokenField E = solve(assemble(m, mat, cfg, prob.source));
  IndicatorReport rep = compute_indicators(E, mat, prob.source, &prob.exact);
  CHECK(rep.total <= 1e-7);
  CHECK(rep.has_error);
  CHECK(rep.exact_flag);
  CHECK(rep.err_total <= 1e-7);
}

TEST_CASE("totals are root-sum-squares of the per-cell columns") {
  Manufactured prob = manufactured_case("trig", 1.0);
  Mesh m = uniform_square_mesh(2);
  MaterialModel mat = MaterialModel::constant(m, 1.0, 1.0, 1.0);
  DGConfig cfg;
  cfg.p = 1;
  BrokenField E = solve(assemble(m, mat, cfg, prob.source));
  IndicatorReport rep = compute_indicators(E, mat, prob.source, &prob.exact);
  CHECK(rep.total_div ==
        doctest::Approx(rep.eta_div.norm()).epsilon(1e-12));
  CHECK(rep.total_curl ==
        doctest::Approx(rep.eta_curl.norm()).epsilon(1e-12));
  CHECK(rep.total_nc == doctest::Approx(rep.eta_nc.norm()).epsilon(1e-12));
  CHECK(rep.total == doctest::Approx(rep.eta_total.norm()).epsilon(1e-12));
  for (int k = 0; k < m.num_cells(); ++k) {
    double sq = rep.eta_div[k] * rep.eta_div[k] +
                rep.eta_curl[k] * rep.eta_curl[k] +
                rep.eta_nc[k] * rep.eta_nc[k];
    CHECK(rep.eta_total[k] == doctest::Approx(std::sqrt(sq)).epsilon(1e-12));
  }
  CHECK(rep.effectivity ==
        doctest::Approx(rep.total / rep.err_total).epsilon(1e-12));
}

TEST_CASE("estimator is reliable and effectivity is h-stable") {
  Manufactured prob = manufactured_case("trig", 1.0);
  std::vector<double> eff;
  for (int n : {2, 4, 8}) {
    Mesh m = uniform_square_mesh(n);
    MaterialModel mat = MaterialModel::constant(m, 1.0, 1.0, 1.0);
    DGConfig cfg;
    cfg.p = 1;
    cfg.eta_star = 20.0;
    BrokenField E = solve(assemble(m, mat, cfg, prob.source));
    IndicatorReport rep = compute_indicators(E, mat, prob.source, &prob.exact);
    CHECK(rep.total >= rep.err_total);  // estimator bounds the error
    eff.push_back(rep.effectivity);
  }
  double lo = *std::min_element(eff.begin(), eff.end());
  double hi = *std::max_element(eff.begin(), eff.end());
  CHECK(hi / lo < 1.5);  // varies by < 50% across levels
}

TEST_CASE("oscillation vanishes for polynomial sources of degree <= p") {
  Mesh m = uniform_square_mesh(2);
  MaterialModel mat = MaterialModel::constant(m, 1.0, 1.0, 1.0);
  SourceTerm src{[](const Vec2& x) { return Vec2(x.x() + 2.0, x.y() * x.x()); },
                 ScalarFn([](const Vec2& x) { return 1.0 + x.x(); })};
  for (int k = 0; k < m.num_cells(); ++k) {
    CHECK(oscillation(m, mat, src, 2, k) <= 1e-12);
    CHECK(oscillation(m, mat, src, 1, k) > 1e-8);  // degree-2 part unresolved at p=1
  }
}

TEST_CASE("local efficiency ratios stay bounded under refinement") {
  Manufactured prob = manufactured_case("trig", 1.0);
  std::vector<double> worst;
  for (int n : {2, 4, 8}) {
    Mesh m = uniform_square_mesh(n);
    MaterialModel mat = MaterialModel::constant(m, 1.0, 1.0, 1.0);
    DGConfig cfg;
    cfg.p = 1;
    cfg.eta_star = 20.0;
    BrokenField E = solve(assemble(m, mat, cfg, prob.source));
    IndicatorReport rep = compute_indicators(E, mat, prob.source, &prob.exact);
    Eigen::VectorXd ratios = local_efficiency_ratios(m, rep);
    worst.push_back(ratios.maxCoeff());
  }
  for (double w : worst) CHECK(w > 0.0);
  CHECK(*std::max_element(worst.begin(), worst.end()) <=
        2.0 * *std::min_element(worst.begin(), worst.end()));
}

TEST_CASE("face neighborhood and cellwise sharp coefficients") {
  Mesh m = uniform_square_mesh(2);
  MaterialModel mat = MaterialModel::constant(m, 2.0, 3.0, 1.0);
  for (int k = 0; k < m.num_cells(); ++k) {
    std::vector<int> nb = face_neighborhood(m, k);
    CHECK(std::is_sorted(nb.begin(), nb.end()));
    CHECK(std::find(nb.begin(), nb.end(), k) != nb.end());
    CHECK(nb.size() <= 4);
    // constant materials: sharp values equal the constants
    CHECK(cell_sharp_eps(m, mat, k) == doctest::Approx(2.0));
    CHECK(cell_sharp_nu(m, mat, k) == doctest::Approx(3.0));
  }
}

TEST_CASE("indicator CSV: header, one row per cell, totals comment") {
  Manufactured prob = manufactured_case("trig", 1.0);
  Mesh m = uniform_square_mesh(2);
  MaterialModel mat = MaterialModel::constant(m, 1.0, 1.0, 1.0);
  DGConfig cfg;
  cfg.p = 1;
  BrokenField E = solve(assemble(m, mat, cfg, prob.source));
  IndicatorReport rep = compute_indicators(E, mat, prob.source, &prob.exact);
  std::stringstream ss;
  write_indicator_csv(ss, rep);
  std::string line;
  std::getline(ss, line);
  CHECK(line.rfind("cell,eta_div,eta_curl,eta_nc,eta", 0) == 0);
  int rows = 0;
  bool saw_totals = false;
  while (std::getline(ss, line)) {
    if (line.rfind("#", 0) == 0)
      saw_totals = saw_totals || line.find("eta=") != std::string::npos;
    else if (!line.empty())
      ++rows;
  }
  CHECK(rows == m.num_cells());
  CHECK(saw_totals);
}
