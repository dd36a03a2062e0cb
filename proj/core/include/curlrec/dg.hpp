// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <random>

#include <Eigen/Sparse>

#include "curlrec/lifting.hpp"

namespace curlrec {

struct DegreeTooLow : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NoConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Piecewise-constant positive material coefficients and frequency.
struct MaterialModel {
  Eigen::VectorXd eps;  // per cell
  Eigen::VectorXd nu;   // per cell
  double omega = 1.0;

  static MaterialModel constant(const Mesh& mesh, double eps, double nu,
                                double omega);
  /// Edgewise max over the adjacent cells.
  double eps_sharp(const Mesh& mesh, int edge) const;
  double nu_sharp(const Mesh& mesh, int edge) const;
};

struct DGConfig {
  int p = 1;
  double eta_star = -1.0;  // < 0: choose automatically at assembly
  double tolerance = 1e-10;
  int max_iterations = 20000;
};

struct SourceTerm {
  VectorFn J;
  std::optional<ScalarFn> div_J;  // analytic divergence when available
};

/// Interior penalty stabilization weight nu_F^sharp p^2 / h_F.
double penalty_weight(const Mesh& mesh, const MaterialModel& mat, int edge, int p);

/// Measured lifting-bound constant (max cell ratio over random samples) and
/// the derived default penalty parameter.
double measure_lifting_constant(const Mesh& mesh, const MaterialModel& mat,
                                int p, int samples = 50, unsigned seed = 1234);
double auto_eta_star(const Mesh& mesh, const MaterialModel& mat, int p);

struct DGSystem {
  const Mesh* mesh = nullptr;
  MaterialModel materials;
  DGConfig config;  // eta_star resolved to its actual value
  Eigen::SparseMatrix<double> matrix;
  Eigen::VectorXd rhs;
};

DGSystem assemble(const Mesh& mesh, const MaterialModel& mat, DGConfig config,
                  const SourceTerm& source);

/// Same matrix without a right-hand side (for norm/coercivity studies).
DGSystem assemble_matrix(const Mesh& mesh, const MaterialModel& mat,
                         DGConfig config);

/// Solve the SPD system: cell-block-Jacobi preconditioned CG, with a direct
/// dense factorization below 2000 unknowns.
BrokenField solve(const DGSystem& system);

/// dG norm |||v||| = (omega^2 ||v||_eps^2 + ||curl_h v||_nu^2 + s_h(v,v))^{1/2}.
double dg_norm(const BrokenField& v, const MaterialModel& mat, int p);
double stabilization(const BrokenField& v, const BrokenField& w,
                     const MaterialModel& mat, int p);

/// b_h(v,w) evaluated through the assembled matrix.
double bilinear(const DGSystem& system, const BrokenField& v, const BrokenField& w);

/// Random broken field with iid uniform(-1,1) coefficients.
BrokenField random_field(const Mesh& mesh, int p, int arity, std::mt19937_64& rng);

/// Min over random fields of b_h(v,v) / |||v|||^2.
double coercivity_check(const Mesh& mesh, const MaterialModel& mat,
                        DGConfig config, int samples, unsigned seed = 99);

/// Exact solution given by callables (manufactured setting).
struct ExactField {
  VectorFn value;
  ScalarFn curl;
};

struct ErrorMeasure {
  Eigen::VectorXd per_cell;  // squared contributions
  double total = 0.0;        // ||e||_sharp
};

/// Error measure ||E - E_h||_sharp over a cell subset (all cells if empty).
ErrorMeasure error_measure(const ExactField& exact, const BrokenField& E_h,
                           const MaterialModel& mat, int p,
                           const std::vector<int>& subset = {});

/// Field in H0(curl) + broken space: an evaluable conforming part plus a
/// broken part; jumps and liftings see only the broken part.
struct SplitField {
  std::optional<ExactField> conforming;
  const BrokenField* broken = nullptr;  // may be null
};

/// Extended bilinear form b_sharp on pairs of split fields.
double extended_bilinear(const Mesh& mesh, const MaterialModel& mat,
                         const DGConfig& config, const SplitField& v,
                         const SplitField& w);

/// ||v||_sharp for a split field (quadrature-based).
double sharp_norm(const Mesh& mesh, const MaterialModel& mat, int p,
                  const SplitField& v);

/// Debug dump of the sparse matrix in `i j value` coordinate format.
void write_system(std::ostream& os, const DGSystem& system);

}  // namespace curlrec
