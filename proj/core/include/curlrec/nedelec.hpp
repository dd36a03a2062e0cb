// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "curlrec/basis.hpp"

namespace curlrec {

/// First-kind edge-element shape functions of degree q on one triangle
/// (dimension q(q+2) = 3q + q(q-1)). Local dof layout: for each local edge
/// f = 0,1,2 (edge f opposite vertex f) the q edge functions -- the Whitney
/// function first, then the q-1 curl-free gradient bubbles -- followed by the
/// q(q-1) interior functions (zero tangential trace on every edge).
/// Edge functions are oriented by ascending global vertex index, so the two
/// cells sharing an edge expose identical tangential traces.
class CellNedelec {
 public:
  CellNedelec(const Mesh& mesh, int cell, int q);

  int degree() const { return q_; }
  int ndof() const { return q_ * (q_ + 2); }
  int interior_dofs() const { return q_ * (q_ - 1); }

  Vec2 eval(int dof, const Vec2& x) const;
  double curl(int dof, const Vec2& x) const;

  /// Values (rows) and curls of all dofs at once.
  void eval_all(const Vec2& x, Eigen::Matrix<double, Eigen::Dynamic, 2>& vals,
                Eigen::VectorXd& curls) const;

 private:
  const Mesh* mesh_;
  int cell_;
  int q_;
  std::array<Vec2, 3> grad_;              // barycentric gradients
  std::array<std::array<int, 2>, 3> ev_;  // per local edge: local vertex
                                          // indices, ascending global id
  Vec2 center_;
  double scale_ = 1.0;
  std::vector<std::pair<int, int>> ab_powers_;  // raw Legendre indices
  Eigen::MatrixXd interior_coef_;               // nint x nraw

  int nraw() const { return q_ * (q_ + 2); }
  void raw_eval(const Vec2& x, Eigen::Matrix<double, Eigen::Dynamic, 2>& vals,
                Eigen::VectorXd& curls) const;
  Vec2 edge_fn(int f, int k, const Vec2& x, double* curl_out) const;
};

/// Global edge-element space of degree q: q dofs per mesh edge (ascending
/// vertex orientation) followed by q(q-1) interior dofs per cell.
class NedelecSpace {
 public:
  NedelecSpace(const Mesh& mesh, int q);

  const Mesh& mesh() const { return *mesh_; }
  int degree() const { return q_; }
  int ndof() const;
  const CellNedelec& cell(int k) const { return cells_[k]; }

  int edge_dof(int edge, int k) const { return edge * q_ + k; }
  int interior_dof(int cellk, int j) const;
  /// Global index of a cell-local dof (CellNedelec layout).
  int cell_dof(int cellk, int local) const;

 private:
  const Mesh* mesh_;
  int q_;
  std::vector<CellNedelec> cells_;
};

/// Shared per-mesh cache; the mesh must outlive the result.
std::shared_ptr<const NedelecSpace> nedelec_space(const Mesh& mesh, int q);

/// Scalar edge function lambda_a lambda_b P_{k-1}(lambda_b - lambda_a) for
/// k >= 1 and its gradient, from barycentric values/gradients of the two
/// (ascending-id) edge endpoints.
double edge_bubble(double la, double lb, int k);
Vec2 edge_bubble_gradient(double la, double lb, const Vec2& ga, const Vec2& gb,
                          int k);

}  // namespace curlrec
