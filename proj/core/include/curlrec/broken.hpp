// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>

#include "curlrec/basis.hpp"

namespace curlrec {

struct EdgeNotOnCell : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using ScalarFn = std::function<double(const Vec2&)>;
using VectorFn = std::function<Vec2(const Vec2&)>;

/// Piecewise polynomial field of total degree <= p with cellwise coefficients
/// in the L2-orthonormal modal basis. Arity 1 (scalar) or 2 (vector); vector
/// coefficient blocks store component 0 modes first, then component 1.
class BrokenField {
 public:
  BrokenField() = default;
  BrokenField(const Mesh& mesh, int degree, int arity);

  const Mesh& mesh() const { return *mesh_; }
  int degree() const { return degree_; }
  int arity() const { return arity_; }
  int block_size() const { return arity_ * scalar_modes(degree_); }
  const ModalBasis& basis() const { return *basis_; }

  Eigen::VectorXd& coeffs() { return coeffs_; }
  const Eigen::VectorXd& coeffs() const { return coeffs_; }
  auto block(int cell) { return coeffs_.segment(cell * block_size(), block_size()); }
  auto block(int cell) const { return coeffs_.segment(cell * block_size(), block_size()); }

  double eval_scalar(int cell, const Vec2& x) const;
  Vec2 eval_vector(int cell, const Vec2& x) const;
  /// Jacobian [d v_i / d x_j] for vector fields; gradient in row 0 for scalars.
  Eigen::Matrix2d eval_jacobian(int cell, const Vec2& x) const;

  /// L2 norm over the whole mesh (equals the coefficient norm).
  double norm() const { return coeffs_.norm(); }
  double norm_cell(int cell) const { return block(cell).norm(); }

 private:
  const Mesh* mesh_ = nullptr;
  int degree_ = 0;
  int arity_ = 1;
  std::shared_ptr<const ModalBasis> basis_;
  Eigen::VectorXd coeffs_;
};

/// L2-orthogonal projection onto the broken space of degree p.
BrokenField l2_project(const Mesh& mesh, const ScalarFn& f, int p,
                       int quad_exactness = -1);
BrokenField l2_project(const Mesh& mesh, const VectorFn& f, int p,
                       int quad_exactness = -1);
BrokenField l2_project(const BrokenField& f, int p);

/// Broken curl of a vector field: curl v = d1 v2 - d2 v1, degree p-1.
BrokenField curl_h(const BrokenField& v);
/// 2D rotated gradient of a scalar field: rot phi = (d2 phi, -d1 phi).
BrokenField rot_scalar(const BrokenField& phi);
/// Broken divergence of a vector field (degree p-1).
BrokenField div_h(const BrokenField& v);

/// Samples of the tangential trace v|_K . t_F at the edge quadrature points.
Eigen::VectorXd tangential_trace(const BrokenField& v, int cell, int edge,
                                 int npoints);

/// Jump of tangential traces across an edge, left minus right; boundary edges
/// use the single trace.
Eigen::VectorXd jump_c(const BrokenField& v, int edge, int npoints);
/// Jump of the normal component across an edge.
Eigen::VectorXd jump_d(const BrokenField& v, int edge, int npoints);
/// Full-value average {v} at the edge quadrature points (rows = points).
Eigen::Matrix<double, Eigen::Dynamic, 2> avg_g(const BrokenField& v, int edge,
                                               int npoints);
/// Scalar average of a scalar broken field.
Eigen::VectorXd avg_scalar(const BrokenField& v, int edge, int npoints);
/// Jump of a scalar broken field (single trace on boundary edges).
Eigen::VectorXd jump_scalar(const BrokenField& v, int edge, int npoints);

/// Jump of the broken curl across an interior edge; zero samples on boundary
/// edges (the 2D convention).
Eigen::VectorXd scalar_jump_of_curl(const BrokenField& v, int edge, int npoints);

/// Product psi_a * v, exact in degree p+1, supported on the patch cells.
BrokenField multiply_by_hat(const BrokenField& v, const VertexPatch& patch);

/// Exact max over v in P_p(K) of ||v||_dK / ((p^2/h_K)^{1/2} ||v||_K),
/// maximized over all cells (generalized eigenvalue computation).
double trace_inequality_ratio(const Mesh& mesh, int p);

/// Default number of edge quadrature points for a field of degree p.
inline int edge_points(int p) { return p + 3; }

/// Text serialization: `field p arity ncells` header then per-cell rows.
void write_field(std::ostream& os, const BrokenField& f);
BrokenField read_field(std::istream& is, const Mesh& mesh);

}  // namespace curlrec
