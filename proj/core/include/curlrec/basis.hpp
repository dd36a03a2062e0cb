// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>

#include "curlrec/mesh.hpp"
#include "curlrec/quadrature.hpp"

namespace curlrec {

inline int scalar_modes(int p) { return (p + 1) * (p + 2) / 2; }

/// L2-orthonormal modal scalar basis of total degree <= p on each physical
/// cell. Built from Legendre products in centroid-scaled local coordinates,
/// orthonormalized per cell (two-pass Cholesky).
class ModalBasis {
 public:
  ModalBasis(const Mesh& mesh, int degree);

  const Mesh& mesh() const { return *mesh_; }
  int degree() const { return degree_; }
  int modes() const { return nmodes_; }

  /// Values of all modes at a physical point of a cell.
  Eigen::VectorXd eval(int cell, const Vec2& x) const;
  /// Gradients (dx, dy) of all modes.
  void eval_grad(int cell, const Vec2& x, Eigen::VectorXd& dx,
                 Eigen::VectorXd& dy) const;

 private:
  const Mesh* mesh_;
  int degree_;
  int nmodes_;
  std::vector<std::pair<int, int>> powers_;  // Legendre indices (i, j)
  std::vector<Eigen::MatrixXd> coef_;        // per cell: modes x raw
  std::vector<Vec2> center_;
  std::vector<double> scale_;

  Eigen::VectorXd raw_eval(int cell, const Vec2& x) const;
  void raw_grad(int cell, const Vec2& x, Eigen::VectorXd& dx,
                Eigen::VectorXd& dy) const;
};

/// Shared per-mesh cache of modal bases; the mesh must outlive the result.
std::shared_ptr<const ModalBasis> modal_basis(const Mesh& mesh, int degree);

/// Quadrature points/weights of a cell in physical coordinates.
struct CellQuad {
  Eigen::Matrix<double, Eigen::Dynamic, 2> points;
  Eigen::VectorXd weights;
};
CellQuad cell_quadrature(const Mesh& mesh, int cell, int exactness);

/// Quadrature points/weights along an edge (parametrized from v0 to v1).
struct EdgeQuad {
  Eigen::Matrix<double, Eigen::Dynamic, 2> points;
  Eigen::VectorXd weights;
};
EdgeQuad edge_quadrature(const Mesh& mesh, int edge, int npoints);

}  // namespace curlrec
