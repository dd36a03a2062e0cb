// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "curlrec/lifting.hpp"
#include "curlrec/nedelec.hpp"

namespace curlrec {

struct SingularPatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Continuous piecewise-P_q scalar space on a vertex patch. With zero_bc the
/// trace vanishes on the patch boundary (dofs: the center-vertex hat when the
/// vertex is interior, bubbles on the interior edges through the vertex, cell
/// bubbles). Without it the space is full P_q continuous on the patch with one
/// vertex value pinned to fix the constant (Neumann problems).
class NodalPatchSpace {
 public:
  enum class Kind { vertex, edge, cell };
  struct Dof {
    Kind kind;
    int id;  // vertex, edge, or cell index in the mesh
    int k;   // bubble index (edge: 1..q-1; cell: 0..(q-1)(q-2)/2-1)
  };

  NodalPatchSpace(const Mesh& mesh, const VertexPatch& patch, int q,
                  bool zero_bc);

  int size() const { return static_cast<int>(dofs_.size()); }
  const std::vector<Dof>& dofs() const { return dofs_; }

  /// Value/gradient of a dof on a patch cell (zero off its support).
  double value(int dof, int cell, const Vec2& x) const;
  Vec2 gradient(int dof, int cell, const Vec2& x) const;

 private:
  const Mesh* mesh_;
  int q_;
  std::vector<Dof> dofs_;
  std::vector<std::pair<int, int>> bubble_powers_;  // degree <= q-3
};

/// Discrete spaces on one vertex patch: the zero-trace edge-element space
/// N_{q,0}(omega_a) (dofs on the interior mesh edges through the vertex plus
/// all cell-interior dofs) and the zero-trace nodal space S_{q,0}(omega_a).
/// Local edge-element dofs carry global orientation, so extension by zero is
/// a pure coefficient scatter through `global_dof`.
class PatchSpaces {
 public:
  PatchSpaces(const Mesh& mesh, const VertexPatch& patch, int q);

  const Mesh& mesh() const { return *mesh_; }
  const VertexPatch& patch() const { return patch_; }
  int degree() const { return q_; }
  const NedelecSpace& space() const { return *space_; }

  int n_dofs() const { return static_cast<int>(global_dof_.size()); }
  const std::vector<int>& active_edges() const { return active_edges_; }
  const std::vector<int>& global_dof() const { return global_dof_; }
  /// Per patch cell: (local patch dof, cell-local CellNedelec dof).
  const std::vector<std::vector<std::pair<int, int>>>& cell_dofs() const {
    return cell_dofs_;
  }
  const NodalPatchSpace& nodal() const { return nodal0_; }

  /// Exact embedding of gradients: S_{q,0} coefficients -> N_{q,0} coefficients.
  Eigen::VectorXd grad_to_nedelec(const Eigen::VectorXd& theta) const;

  /// Evaluate a local coefficient vector on a patch cell.
  Vec2 eval(const Eigen::VectorXd& coeffs, int cell, const Vec2& x) const;
  double eval_curl(const Eigen::VectorXd& coeffs, int cell, const Vec2& x) const;

 private:
  const Mesh* mesh_;
  VertexPatch patch_;
  int q_;
  std::shared_ptr<const NedelecSpace> space_;
  std::vector<int> active_edges_;
  std::vector<int> global_dof_;
  std::vector<std::vector<std::pair<int, int>>> cell_dofs_;
  NodalPatchSpace nodal0_;
};

/// One patch contribution: divergence-constrained curl solve U, Poisson solve
/// theta, and the summed field E = U + grad(theta) in N_{q,0} coefficients.
struct PatchSolution {
  Eigen::VectorXd U;
  Eigen::VectorXd multiplier;
  Eigen::VectorXd theta;
  Eigen::VectorXd E;
  double curl_residual = 0.0;        // relative saddle-point residual
  double divergence_residual = 0.0;  // max |(U, grad v)|
};

/// Constrained curl-curl solve: (curl U, curl W) = (rhs, curl W) for all W in
/// N_{q,0} with (U, grad v) = 0 for all v in S_{q,0} (saddle point, direct
/// factorization). `rhs` is sampled per (mesh cell, point).
Eigen::VectorXd solve_patch_curl(
    const PatchSpaces& ps, const std::function<double(int, const Vec2&)>& rhs,
    double* residual = nullptr, Eigen::VectorXd* multiplier = nullptr,
    double* div_residual = nullptr);

/// Poisson solve: (grad theta, grad v) = (psi_a E_h, grad v) on S_{q,0}.
Eigen::VectorXd solve_patch_poisson(const PatchSpaces& ps,
                                    const BrokenField& E_h);

PatchSolution solve_patch(const PatchSpaces& ps, const BrokenField& E_h,
                          const LiftingOperator& lifting);

/// Global zero-trace edge-element field of degree q (coefficients over the
/// full global dof set; boundary-edge dofs stay zero).
class ConformingField {
 public:
  ConformingField() = default;
  ConformingField(const Mesh& mesh, int q);

  const Mesh& mesh() const { return *mesh_; }
  int degree() const { return q_; }
  const NedelecSpace& space() const { return *space_; }
  Eigen::VectorXd& coeffs() { return coeffs_; }
  const Eigen::VectorXd& coeffs() const { return coeffs_; }

  Vec2 eval(int cell, const Vec2& x) const;
  double curl(int cell, const Vec2& x) const;

 private:
  const Mesh* mesh_ = nullptr;
  int q_ = 1;
  std::shared_ptr<const NedelecSpace> space_;
  Eigen::VectorXd coeffs_;
};

/// Patchwise reconstruction R(E_h): sum of per-vertex patch fields extended
/// by zero. Requires q >= p + 1.
ConformingField reconstruct(const BrokenField& E_h, int q);

/// Max over edges of the tangential-trace mismatch of a conforming field
/// (interior jumps and boundary traces) at edge quadrature points.
double conformity_defect(const ConformingField& f);

/// Ratios of the reconstruction-error norms to the jump terms bounding them.
struct TheoremRatios {
  bool conforming_input = false;  // jump denominators vanish
  double ratio_curl = 0.0;        // ||curl_h(E_c - E_h)|| / jump bound
  double ratio_l2 = 0.0;          // ||E_c - E_h|| / jump bound
  double num_curl = 0.0, num_l2 = 0.0;
  double den_curl = 0.0, den_l2 = 0.0;
};
TheoremRatios theorem_ratios(const BrokenField& E_h, const ConformingField& E_c);

/// Discrete Helmholtz decomposition check on a patch: Neumann solve for xi in
/// S_q(omega_a)/constants, Pythagoras defect and projection residual.
struct HelmholtzResult {
  double defect = 0.0;     // | ||v||^2 - ||v - grad xi||^2 - ||grad xi||^2 |
  double residual = 0.0;   // max_w |(v - grad xi, grad w)|
  double grad_norm = 0.0;  // ||grad xi||
};
HelmholtzResult helmholtz_check(const Mesh& mesh, const VertexPatch& patch,
                                const BrokenField& v, int q);

/// Ratio tested against the broken divergence-preserving Poincare inequality:
/// ||E_a - psi_a E_h|| over h_a times the curl/jump seminorm of the data.
struct PoincareResult {
  bool conforming = false;  // denominator vanishes
  double ratio = 0.0;
  double numerator = 0.0, denominator = 0.0;
};
PoincareResult poincare_ratio(const Mesh& mesh, const VertexPatch& patch,
                              const BrokenField& E_h, int q);

/// Text serialization: `nedelec q ndof` header + one coefficient per line.
void write_conforming(std::ostream& os, const ConformingField& f);
ConformingField read_conforming(std::istream& is, const Mesh& mesh);

}  // namespace curlrec
