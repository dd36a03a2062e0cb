// SPDX-License-Identifier: Apache-2.0
#include "curlrec/nedelec.hpp"

#include <map>
#include <mutex>

namespace curlrec {

double edge_bubble(double la, double lb, int k) {
  return la * lb * legendre(k - 1, lb - la);
}

Vec2 edge_bubble_gradient(double la, double lb, const Vec2& ga, const Vec2& gb,
                          int k) {
  double P = legendre(k - 1, lb - la);
  double dP = legendre_deriv(k - 1, lb - la);
  return (lb * P) * ga + (la * P) * gb + (la * lb * dP) * (gb - ga);
}

namespace {
double cross2(const Vec2& a, const Vec2& b) {
  return a.x() * b.y() - a.y() * b.x();
}
}  // namespace

CellNedelec::CellNedelec(const Mesh& mesh, int cell, int q)
    : mesh_(&mesh), cell_(cell), q_(q) {
  if (q < 1) throw std::invalid_argument("edge-element degree must be >= 1");
  for (int i = 0; i < 3; ++i) grad_[i] = mesh.barycentric_gradient(cell, i);
  const auto& c = mesh.cells[cell];
  for (int f = 0; f < 3; ++f) {
    int a = (f + 1) % 3, b = (f + 2) % 3;
    if (c[a] > c[b]) std::swap(a, b);
    ev_[f] = {a, b};
  }
  center_ = (mesh.vertices[c[0]] + mesh.vertices[c[1]] + mesh.vertices[c[2]]) / 3.0;
  scale_ = mesh.cell_diameter[cell] / 2.0;
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q - i; ++j) ab_powers_.emplace_back(i, j);

  const int nint = interior_dofs();
  if (nint == 0) return;

  // Interior functions: nullspace of the tangential trace moments of the full
  // raw span, then L2-orthonormalized.
  const int nr = nraw();
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(3 * q, nr);
  Eigen::Matrix<double, Eigen::Dynamic, 2> vals;
  Eigen::VectorXd curls;
  for (int f = 0; f < 3; ++f) {
    int e = mesh.cell_edges[cell][f].first;
    const Edge& ed = mesh.edges[e];
    EdgeQuad eq = edge_quadrature(mesh, e, q + 3);
    Vec2 p0 = mesh.vertices[ed.v0];
    Vec2 dir = mesh.vertices[ed.v1] - mesh.vertices[ed.v0];
    for (int i = 0; i < eq.points.rows(); ++i) {
      Vec2 x = eq.points.row(i);
      double t = (x - p0).dot(dir) / dir.squaredNorm();
      raw_eval(x, vals, curls);
      Eigen::VectorXd tang = vals * ed.tangent;
      for (int m = 0; m < q; ++m)
        M.row(f * q + m) +=
            (eq.weights[i] * legendre(m, 2.0 * t - 1.0)) * tang.transpose();
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
  interior_coef_ =
      svd.matrixV().rightCols(nr - 3 * q).transpose();  // nint x nr

  auto gram = [&]() {
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(nint, nint);
    CellQuad cq = cell_quadrature(mesh, cell, 2 * q + 2);
    for (int i = 0; i < cq.points.rows(); ++i) {
      raw_eval(cq.points.row(i), vals, curls);
      Eigen::Matrix<double, Eigen::Dynamic, 2> iv = interior_coef_ * vals;
      G += cq.weights[i] * iv * iv.transpose();
    }
    return G;
  };
  for (int pass = 0; pass < 2; ++pass) {
    Eigen::LLT<Eigen::MatrixXd> llt(gram());
    if (llt.info() != Eigen::Success)
      throw std::runtime_error("edge-element interior basis: Gram not SPD");
    interior_coef_ = llt.matrixL().solve(interior_coef_);
  }
}

void CellNedelec::raw_eval(const Vec2& x,
                           Eigen::Matrix<double, Eigen::Dynamic, 2>& vals,
                           Eigen::VectorXd& curls) const {
  const int nr = nraw();
  vals.resize(nr, 2);
  curls.resize(nr);
  const double xi = (x.x() - center_.x()) / scale_;
  const double up = (x.y() - center_.y()) / scale_;
  const int nA = static_cast<int>(ab_powers_.size());
  for (int idx = 0; idx < nA; ++idx) {
    auto [i, j] = ab_powers_[idx];
    double v = legendre(i, xi) * legendre(j, up);
    double dvy = legendre(i, xi) * legendre_deriv(j, up) / scale_;
    double dvx = legendre_deriv(i, xi) * legendre(j, up) / scale_;
    vals(idx, 0) = v;
    vals(idx, 1) = 0.0;
    curls[idx] = -dvy;
    vals(nA + idx, 0) = 0.0;
    vals(nA + idx, 1) = v;
    curls[nA + idx] = dvx;
  }
  for (int a = 0; a < q_; ++a) {
    int b = q_ - 1 - a;
    double m = std::pow(xi, a) * std::pow(up, b);
    int idx = 2 * nA + a;
    vals(idx, 0) = -up * m;
    vals(idx, 1) = xi * m;
    curls[idx] = (q_ + 1) * m / scale_;
  }
}

Vec2 CellNedelec::edge_fn(int f, int k, const Vec2& x, double* curl_out) const {
  Eigen::Vector3d lam = mesh_->barycentric(cell_, x);
  int a = ev_[f][0], b = ev_[f][1];
  if (k == 0) {
    if (curl_out) *curl_out = 2.0 * cross2(grad_[a], grad_[b]);
    return lam[a] * grad_[b] - lam[b] * grad_[a];
  }
  if (curl_out) *curl_out = 0.0;
  return edge_bubble_gradient(lam[a], lam[b], grad_[a], grad_[b], k);
}

Vec2 CellNedelec::eval(int dof, const Vec2& x) const {
  if (dof < 3 * q_) return edge_fn(dof / q_, dof % q_, x, nullptr);
  Eigen::Matrix<double, Eigen::Dynamic, 2> vals;
  Eigen::VectorXd curls;
  raw_eval(x, vals, curls);
  return (interior_coef_.row(dof - 3 * q_) * vals).transpose();
}

double CellNedelec::curl(int dof, const Vec2& x) const {
  if (dof < 3 * q_) {
    double c;
    edge_fn(dof / q_, dof % q_, x, &c);
    return c;
  }
  Eigen::Matrix<double, Eigen::Dynamic, 2> vals;
  Eigen::VectorXd curls;
  raw_eval(x, vals, curls);
  return interior_coef_.row(dof - 3 * q_).dot(curls);
}

void CellNedelec::eval_all(const Vec2& x,
                           Eigen::Matrix<double, Eigen::Dynamic, 2>& vals,
                           Eigen::VectorXd& curls) const {
  vals.resize(ndof(), 2);
  curls.resize(ndof());
  for (int f = 0; f < 3; ++f)
    for (int k = 0; k < q_; ++k) {
      double c;
      Vec2 v = edge_fn(f, k, x, &c);
      vals.row(f * q_ + k) = v.transpose();
      curls[f * q_ + k] = c;
    }
  if (interior_dofs() > 0) {
    Eigen::Matrix<double, Eigen::Dynamic, 2> rv;
    Eigen::VectorXd rc;
    raw_eval(x, rv, rc);
    vals.bottomRows(interior_dofs()) = interior_coef_ * rv;
    curls.tail(interior_dofs()) = interior_coef_ * rc;
  }
}

NedelecSpace::NedelecSpace(const Mesh& mesh, int q) : mesh_(&mesh), q_(q) {
  cells_.reserve(mesh.num_cells());
  for (int k = 0; k < mesh.num_cells(); ++k) cells_.emplace_back(mesh, k, q);
}

int NedelecSpace::ndof() const {
  return mesh_->num_edges() * q_ + mesh_->num_cells() * q_ * (q_ - 1);
}

int NedelecSpace::interior_dof(int cellk, int j) const {
  return mesh_->num_edges() * q_ + cellk * q_ * (q_ - 1) + j;
}

int NedelecSpace::cell_dof(int cellk, int local) const {
  if (local < 3 * q_) {
    int f = local / q_;
    return edge_dof(mesh_->cell_edges[cellk][f].first, local % q_);
  }
  return interior_dof(cellk, local - 3 * q_);
}

std::shared_ptr<const NedelecSpace> nedelec_space(const Mesh& mesh, int q) {
  static std::mutex mtx;
  static std::map<std::pair<std::uint64_t, int>,
                  std::weak_ptr<const NedelecSpace>>
      cache;
  std::lock_guard<std::mutex> lock(mtx);
  auto key = std::make_pair(mesh.id(), q);
  if (auto it = cache.find(key); it != cache.end())
    if (auto sp = it->second.lock()) return sp;
  auto sp = std::make_shared<const NedelecSpace>(mesh, q);
  cache[key] = sp;
  return sp;
}

}  // namespace curlrec
