// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "curlrec/dg.hpp"

namespace curlrec {

/// Per-cell error indicators and global totals. Error-measure entries are
/// present only when an exact solution was supplied; when the total error is
/// below the exactness threshold the effectivity is reported as "exact".
struct IndicatorReport {
  int p = 1;
  Eigen::VectorXd eta_div;    // per-cell values
  Eigen::VectorXd eta_curl;
  Eigen::VectorXd eta_nc;
  Eigen::VectorXd eta_total;  // sqrt(div^2 + curl^2 + nc^2) per cell
  double total_div = 0.0;     // root-sum-square over cells
  double total_curl = 0.0;
  double total_nc = 0.0;
  double total = 0.0;
  Eigen::VectorXd oscillation;   // per-cell osc_{K^f}
  bool has_error = false;
  Eigen::VectorXd err_sharp_sq;  // per-cell squared ||e||_sharp contributions
  double err_total = 0.0;
  bool exact_flag = false;       // err_total below 1e-10: effectivity undefined
  double effectivity = 0.0;      // total / err_total when defined
};

/// Max of a coefficient over the edges of a cell (cell plus face neighbors).
double cell_sharp_eps(const Mesh& mesh, const MaterialModel& mat, int cell);
double cell_sharp_nu(const Mesh& mesh, const MaterialModel& mat, int cell);

/// The cell together with its face neighbors, ascending.
std::vector<int> face_neighborhood(const Mesh& mesh, int cell);

/// Divergence-constraint indicator.
double eta_div(const BrokenField& E_h, const MaterialModel& mat,
               const SourceTerm& source, int cell);
/// Maxwell-residual indicator.
double eta_curl(const BrokenField& E_h, const MaterialModel& mat,
                const SourceTerm& source, int cell);
/// Nonconformity indicator.
double eta_nc(const BrokenField& E_h, const MaterialModel& mat, int cell);

/// Data-oscillation surrogate over the face neighborhood of a cell, using the
/// componentwise degree-p projection of the source (an upper bound on the min).
double oscillation(const Mesh& mesh, const MaterialModel& mat,
                   const SourceTerm& source, int p, int cell);

IndicatorReport compute_indicators(const BrokenField& E_h,
                                   const MaterialModel& mat,
                                   const SourceTerm& source,
                                   const ExactField* exact = nullptr);

/// Per-cell eta_K / (||e||_{sharp,K^f} + osc_{K^f}); requires error data.
Eigen::VectorXd local_efficiency_ratios(const Mesh& mesh,
                                        const IndicatorReport& report);

/// CSV dump: `cell,eta_div,eta_curl,eta_nc,eta[,err_sharp]` plus a trailing
/// metadata comment line with the global totals.
void write_indicator_csv(std::ostream& os, const IndicatorReport& report);

}  // namespace curlrec
