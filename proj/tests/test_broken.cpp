// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "curlrec/broken.hpp"

using namespace curlrec;

namespace {

Mesh two_cell_square() {
  std::vector<Vec2> v = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  std::vector<std::array<int, 3>> c = {{0, 1, 2}, {0, 2, 3}};
  return build_mesh(v, c);
}

BrokenField random_broken(const Mesh& mesh, int p, int arity, unsigned seed) {
  BrokenField f(mesh, p, arity);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < f.coeffs().size(); ++i) f.coeffs()[i] = u(rng);
  return f;
}

}  // namespace

TEST_CASE("projection reproduces polynomials exactly") {
  Mesh m = uniform_square_mesh(2);
  auto f = [](const Vec2& x) { return 2.0 + 3.0 * x.x() - x.y() + x.x() * x.y(); };
  BrokenField fh = l2_project(m, ScalarFn(f), 2);
  for (int k = 0; k < m.num_cells(); ++k) {
    Vec2 c = (m.vertices[m.cells[k][0]] + m.vertices[m.cells[k][1]] +
              m.vertices[m.cells[k][2]]) /
             3.0;
    CHECK(fh.eval_scalar(k, c) == doctest::Approx(f(c)).epsilon(1e-12));
  }
}

TEST_CASE("L2 norm equals the coefficient norm (orthonormal basis)") {
  Mesh m = uniform_square_mesh(2);
  BrokenField f = random_broken(m, 2, 2, 5);
  double quad = 0.0;
  for (int k = 0; k < m.num_cells(); ++k) {
    CellQuad q = cell_quadrature(m, k, 6);
    for (int i = 0; i < q.points.rows(); ++i)
      quad += q.weights[i] * f.eval_vector(k, q.points.row(i)).squaredNorm();
  }
  CHECK(std::sqrt(quad) == doctest::Approx(f.norm()).epsilon(1e-12));
}

TEST_CASE("broken differential operators agree with analytic derivatives") {
  Mesh m = uniform_square_mesh(2);
  // v = (x^2 y, x y): curl v = y - x^2, div v = 2 x y + x
  BrokenField v = l2_project(
      m, VectorFn([](const Vec2& x) {
        return Vec2(x.x() * x.x() * x.y(), x.x() * x.y());
      }),
      3);
  BrokenField cv = curl_h(v);
  BrokenField dv = div_h(v);
  // phi = x y^2: rot phi = (2 x y, -y^2)
  BrokenField phi = l2_project(
      m, ScalarFn([](const Vec2& x) { return x.x() * x.y() * x.y(); }), 3);
  BrokenField rphi = rot_scalar(phi);
  for (int k = 0; k < m.num_cells(); ++k) {
    Vec2 c = (m.vertices[m.cells[k][0]] + m.vertices[m.cells[k][1]] +
              m.vertices[m.cells[k][2]]) /
             3.0;
    CHECK(cv.eval_scalar(k, c) ==
          doctest::Approx(c.y() - c.x() * c.x()).epsilon(1e-11));
    CHECK(dv.eval_scalar(k, c) ==
          doctest::Approx(2 * c.x() * c.y() + c.x()).epsilon(1e-11));
    CHECK((rphi.eval_vector(k, c) - Vec2(2 * c.x() * c.y(), -c.y() * c.y()))
              .norm() <= 1e-11);
  }
}

TEST_CASE("divergence theorem on each cell") {
  // int_K div v = sum over edges of iota int_F v . n_F
  Mesh m = uniform_square_mesh(2);
  BrokenField v = random_broken(m, 3, 2, 7);
  BrokenField dv = div_h(v);
  for (int k = 0; k < m.num_cells(); ++k) {
    CellQuad q = cell_quadrature(m, k, 6);
    double vol = 0.0;
    for (int i = 0; i < q.points.rows(); ++i)
      vol += q.weights[i] * dv.eval_scalar(k, q.points.row(i));
    double srf = 0.0;
    for (const auto& [e, iota] : m.cell_edges[k]) {
      EdgeQuad eq = edge_quadrature(m, e, 6);
      for (int i = 0; i < eq.points.rows(); ++i)
        srf += iota * eq.weights[i] *
               v.eval_vector(k, eq.points.row(i)).dot(m.edges[e].normal);
    }
    CHECK(vol == doctest::Approx(srf).epsilon(1e-10));
  }
}

TEST_CASE("cellwise integration by parts pins the sign conventions") {
  // (curl v, phi)_K - (v, rot phi)_K - contour integral of (v . t_ccw) phi = 0,
  // where the counterclockwise tangent on edge F of cell K is iota * t_F.
  Mesh m = uniform_square_mesh(2);
  BrokenField v = random_broken(m, 3, 2, 17);
  BrokenField phi = random_broken(m, 3, 1, 18);
  BrokenField cv = curl_h(v);
  BrokenField rphi = rot_scalar(phi);
  for (int k = 0; k < m.num_cells(); ++k) {
    CellQuad q = cell_quadrature(m, k, 8);
    double volume = 0.0;
    for (int i = 0; i < q.points.rows(); ++i) {
      Vec2 x = q.points.row(i);
      volume += q.weights[i] * (cv.eval_scalar(k, x) * phi.eval_scalar(k, x) -
                                v.eval_vector(k, x).dot(rphi.eval_vector(k, x)));
    }
    double contour = 0.0;
    for (const auto& [e, iota] : m.cell_edges[k]) {
      const int np = 8;
      EdgeQuad eq = edge_quadrature(m, e, np);
      Eigen::VectorXd tt = tangential_trace(v, k, e, np);
      for (int i = 0; i < np; ++i)
        contour += iota * eq.weights[i] * tt[i] *
                   phi.eval_scalar(k, eq.points.row(i));
    }
    CHECK(std::abs(volume - contour) <= 1e-12 * (1.0 + std::abs(volume)));
  }
}

TEST_CASE("tangential trace of (y,0) on the unit-square diagonal") {
  Mesh m = two_cell_square();
  BrokenField v = l2_project(
      m, VectorFn([](const Vec2& x) { return Vec2(x.y(), 0.0); }), 1);
  int diag = -1;
  for (int e = 0; e < m.num_edges(); ++e)
    if (!m.edges[e].is_boundary) diag = e;
  REQUIRE(diag >= 0);
  CHECK(m.edges[diag].v0 == 0);
  CHECK(m.edges[diag].v1 == 2);
  // midpoint (1/2, 1/2): v = (1/2, 0); t_F = (-1,-1)/sqrt(2), so v.t = -1/(2 sqrt 2)
  const int np = 3;
  EdgeQuad eq = edge_quadrature(m, diag, np);
  Eigen::VectorXd tt = tangential_trace(v, m.edges[diag].left_cell, diag, np);
  int mid = -1;
  for (int i = 0; i < np; ++i)
    if ((Vec2(eq.points.row(i)) - Vec2(0.5, 0.5)).norm() < 1e-12) mid = i;
  REQUIRE(mid >= 0);
  CHECK(tt[mid] == doctest::Approx(-1.0 / (2.0 * std::sqrt(2.0))).epsilon(1e-12));
}

TEST_CASE("jumps and averages: conforming fields have zero interior jump") {
  Mesh m = uniform_square_mesh(2);
  // smooth polynomial, projected exactly: jumps vanish on interior edges
  BrokenField v = l2_project(
      m, VectorFn([](const Vec2& x) { return Vec2(x.y() * x.y(), x.x()); }), 2);
  for (int e = 0; e < m.num_edges(); ++e) {
    if (m.edges[e].is_boundary) continue;
    CHECK(jump_c(v, e, 5).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(jump_d(v, e, 5).cwiseAbs().maxCoeff() <= 1e-12);
    // the average reproduces the single-valued trace
    Eigen::Matrix<double, Eigen::Dynamic, 2> av = avg_g(v, e, 5);
    EdgeQuad eq = edge_quadrature(m, e, 5);
    for (int i = 0; i < 5; ++i) {
      Vec2 x = eq.points.row(i);
      CHECK((Vec2(av.row(i)) - v.eval_vector(m.edges[e].left_cell, x)).norm() <=
            1e-12);
    }
  }
}

TEST_CASE("jump orientation is left minus right; boundary uses the single trace") {
  Mesh m = two_cell_square();
  BrokenField v(m, 1, 2);
  // constant (1,0) on the left cell only
  BrokenField unit = l2_project(
      m, VectorFn([](const Vec2&) { return Vec2(1.0, 0.0); }), 1);
  v.block(0) = unit.block(0);
  for (int e = 0; e < m.num_edges(); ++e) {
    const Edge& ed = m.edges[e];
    const int np = 3;
    Eigen::VectorXd j = jump_c(v, e, np);
    Eigen::VectorXd expect;
    if (ed.left_cell == 0)
      expect = tangential_trace(v, 0, e, np);
    else if (!ed.is_boundary && ed.right_cell == 0)
      expect = -tangential_trace(v, 0, e, np);
    else
      expect = Eigen::VectorXd::Zero(np);
    CHECK((j - expect).cwiseAbs().maxCoeff() <= 1e-13);
  }
}

TEST_CASE("scalar jump of curl vanishes on boundary edges by convention") {
  Mesh m = uniform_square_mesh(2);
  BrokenField v = random_broken(m, 2, 2, 23);
  for (int e = 0; e < m.num_edges(); ++e) {
    Eigen::VectorXd j = scalar_jump_of_curl(v, e, 4);
    if (m.edges[e].is_boundary) {
      CHECK(j.cwiseAbs().maxCoeff() == 0.0);
    } else {
      BrokenField cv = curl_h(v);
      Eigen::VectorXd ref = jump_scalar(cv, e, 4);
      CHECK((j - ref).cwiseAbs().maxCoeff() <= 1e-11);
    }
  }
}

TEST_CASE("multiply_by_hat is exact for the degree-(p+1) product") {
  Mesh m = uniform_square_mesh(2);
  BrokenField v = random_broken(m, 2, 2, 31);
  for (int a : {0, m.num_vertices() / 2, m.num_vertices() - 1}) {
    VertexPatch patch = vertex_patch(m, a);
    BrokenField pv = multiply_by_hat(v, patch);
    CHECK(pv.degree() == v.degree() + 1);
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < m.num_cells(); ++k) {
      bool in_patch =
          std::find(patch.cells.begin(), patch.cells.end(), k) != patch.cells.end();
      for (int rep = 0; rep < 4; ++rep) {
        double b = u(rng), c = u(rng) * (1 - b);
        Vec2 x = b * m.vertices[m.cells[k][0]] + c * m.vertices[m.cells[k][1]] +
                 (1 - b - c) * m.vertices[m.cells[k][2]];
        Vec2 expect = in_patch ? Vec2(patch.hat(m, k, x) * v.eval_vector(k, x))
                               : Vec2(Vec2::Zero());
        CHECK((pv.eval_vector(k, x) - expect).norm() <= 1e-12);
      }
    }
  }
}

TEST_CASE("trace inequality ratio: scale invariant and p-uniform") {
  Mesh m1 = uniform_square_mesh(2);
  std::vector<Vec2> scaled;
  for (const Vec2& v : m1.vertices) scaled.push_back(2.0 * v);
  Mesh m2 = build_mesh(scaled, m1.cells);
  for (int p = 1; p <= 4; ++p) {
    double r1 = trace_inequality_ratio(m1, p);
    double r2 = trace_inequality_ratio(m2, p);
    CHECK(r1 > 0.0);
    CHECK(r1 == doctest::Approx(r2).epsilon(1e-10));  // x -> 2x leaves it unchanged
    // one p-independent constant bounds the whole family (the p = 1 value is
    // the largest: the p^2/h_K weight grows faster than the trace constant)
    CHECK(r1 <= 1.3 * trace_inequality_ratio(m1, 1));
  }
}

TEST_CASE("field serialization round trip") {
  Mesh m = uniform_square_mesh(2);
  BrokenField f = random_broken(m, 3, 2, 41);
  std::stringstream ss;
  write_field(ss, f);
  BrokenField back = read_field(ss, m);
  CHECK(back.degree() == f.degree());
  CHECK(back.arity() == f.arity());
  CHECK((back.coeffs() - f.coeffs()).cwiseAbs().maxCoeff() == 0.0);
}
