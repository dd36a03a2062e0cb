// SPDX-License-Identifier: Apache-2.0
#include "curlrec/basis.hpp"

#include <map>
#include <mutex>

namespace curlrec {

ModalBasis::ModalBasis(const Mesh& mesh, int degree)
    : mesh_(&mesh), degree_(degree), nmodes_(scalar_modes(degree)) {
  for (int d = 0; d <= degree; ++d)
    for (int i = d; i >= 0; --i) powers_.emplace_back(i, d - i);

  const int nc = mesh.num_cells();
  coef_.resize(nc);
  center_.resize(nc);
  scale_.resize(nc);
  const QuadratureRule& rule = triangle_rule(2 * degree + 2);
  for (int k = 0; k < nc; ++k) {
    const auto& c = mesh.cells[k];
    center_[k] = (mesh.vertices[c[0]] + mesh.vertices[c[1]] + mesh.vertices[c[2]]) / 3.0;
    scale_[k] = 0.5 * mesh.cell_diameter[k];
    CellQuad q = cell_quadrature(mesh, k, 2 * degree + 2);
    Eigen::MatrixXd V(q.points.rows(), nmodes_);
    coef_[k] = Eigen::MatrixXd::Identity(nmodes_, nmodes_);
    // Two-pass Cholesky orthonormalization of the raw Legendre products.
    for (int pass = 0; pass < 2; ++pass) {
      for (int iq = 0; iq < q.points.rows(); ++iq)
        V.row(iq) = (coef_[k] * raw_eval(k, q.points.row(iq))).transpose();
      Eigen::MatrixXd G = V.transpose() * q.weights.asDiagonal() * V;
      Eigen::LLT<Eigen::MatrixXd> llt(G);
      coef_[k] = llt.matrixL().solve(coef_[k]);
    }
    (void)rule;
  }
}

Eigen::VectorXd ModalBasis::raw_eval(int cell, const Vec2& x) const {
  double xi = (x.x() - center_[cell].x()) / scale_[cell];
  double et = (x.y() - center_[cell].y()) / scale_[cell];
  Eigen::VectorXd v(nmodes_);
  for (int m = 0; m < nmodes_; ++m)
    v[m] = legendre(powers_[m].first, xi) * legendre(powers_[m].second, et);
  return v;
}

void ModalBasis::raw_grad(int cell, const Vec2& x, Eigen::VectorXd& dx,
                          Eigen::VectorXd& dy) const {
  double s = scale_[cell];
  double xi = (x.x() - center_[cell].x()) / s;
  double et = (x.y() - center_[cell].y()) / s;
  dx.resize(nmodes_);
  dy.resize(nmodes_);
  for (int m = 0; m < nmodes_; ++m) {
    auto [i, j] = powers_[m];
    dx[m] = legendre_deriv(i, xi) * legendre(j, et) / s;
    dy[m] = legendre(i, xi) * legendre_deriv(j, et) / s;
  }
}

Eigen::VectorXd ModalBasis::eval(int cell, const Vec2& x) const {
  return coef_[cell] * raw_eval(cell, x);
}

void ModalBasis::eval_grad(int cell, const Vec2& x, Eigen::VectorXd& dx,
                           Eigen::VectorXd& dy) const {
  Eigen::VectorXd rdx, rdy;
  raw_grad(cell, x, rdx, rdy);
  dx = coef_[cell] * rdx;
  dy = coef_[cell] * rdy;
}

std::shared_ptr<const ModalBasis> modal_basis(const Mesh& mesh, int degree) {
  static std::mutex mtx;
  static std::map<std::pair<std::uint64_t, int>, std::weak_ptr<const ModalBasis>> cache;
  std::scoped_lock lock(mtx);
  auto key = std::make_pair(mesh.id(), degree);
  if (auto it = cache.find(key); it != cache.end())
    if (auto sp = it->second.lock()) return sp;
  auto sp = std::make_shared<const ModalBasis>(mesh, degree);
  cache[key] = sp;
  return sp;
}

CellQuad cell_quadrature(const Mesh& mesh, int cell, int exactness) {
  const QuadratureRule& rule = triangle_rule(exactness);
  const auto& c = mesh.cells[cell];
  const Vec2 &a = mesh.vertices[c[0]], &b = mesh.vertices[c[1]], &d = mesh.vertices[c[2]];
  CellQuad q;
  const int n = static_cast<int>(rule.points.rows());
  q.points.resize(n, 2);
  q.weights.resize(n);
  double jac = 2.0 * mesh.cell_area[cell];
  for (int i = 0; i < n; ++i) {
    double u = rule.points(i, 0), v = rule.points(i, 1);
    q.points.row(i) = (a + u * (b - a) + v * (d - a)).transpose();
    q.weights[i] = rule.weights[i] * jac;
  }
  return q;
}

EdgeQuad edge_quadrature(const Mesh& mesh, int edge, int npoints) {
  const QuadratureRule& rule = segment_rule(npoints);
  const Edge& e = mesh.edges[edge];
  const Vec2 &a = mesh.vertices[e.v0], &b = mesh.vertices[e.v1];
  EdgeQuad q;
  q.points.resize(npoints, 2);
  q.weights.resize(npoints);
  for (int i = 0; i < npoints; ++i) {
    double s = rule.points(i, 0);
    q.points.row(i) = ((1.0 - s) * a + s * b).transpose();
    q.weights[i] = rule.weights[i] * e.length;
  }
  return q;
}

}  // namespace curlrec
