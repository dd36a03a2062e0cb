// SPDX-License-Identifier: Apache-2.0
#include "curlrec/lifting.hpp"

namespace curlrec {

LiftingOperator::LiftingOperator(const Mesh& mesh, int target_degree)
    : mesh_(&mesh), p_(target_degree) {}

BrokenField LiftingOperator::lift(const BrokenField& v) const {
  if (v.arity() != 2) throw std::invalid_argument("lift: vector field required");
  if (v.degree() > p_ + 1)
    throw std::invalid_argument("lift: input degree exceeds p+1");
  const Mesh& mesh = *mesh_;
  BrokenField out(mesh, p_, 1);
  const int np = edge_points(std::max(v.degree(), p_));
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const Edge& ed = mesh.edges[e];
    Eigen::VectorXd jump = jump_c(v, e, np);
    if (jump.isZero(0.0)) continue;
    EdgeQuad q = edge_quadrature(mesh, e, np);
    const double w = ed.is_boundary ? 1.0 : 0.5;
    for (int side = 0; side < (ed.is_boundary ? 1 : 2); ++side) {
      int cell = side == 0 ? ed.left_cell : ed.right_cell;
      for (int i = 0; i < np; ++i) {
        Eigen::VectorXd phi = out.basis().eval(cell, q.points.row(i));
        out.block(cell) += w * q.weights[i] * jump[i] * phi;
      }
    }
  }
  return out;
}

std::vector<double> LiftingOperator::bound_ratios(const BrokenField& v) const {
  const Mesh& mesh = *mesh_;
  BrokenField lv = lift(v);
  const int np = edge_points(std::max(v.degree(), p_));
  std::vector<double> ratios;
  for (int k = 0; k < mesh.num_cells(); ++k) {
    double denom2 = 0.0;
    for (const auto& [e, sign] : mesh.cell_edges[k]) {
      Eigen::VectorXd jump = jump_c(v, e, np);
      EdgeQuad q = edge_quadrature(mesh, e, np);
      denom2 += (double(p_) * p_ / mesh.cell_diameter[k]) *
                jump.cwiseAbs2().dot(q.weights);
    }
    if (denom2 <= 1e-28) continue;
    ratios.push_back(lv.norm_cell(k) / std::sqrt(denom2));
  }
  return ratios;
}

}  // namespace curlrec
