// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "curlrec/broken.hpp"

namespace curlrec {

/// Jump lifting operator: the scalar broken field L(v) of degree p defined by
/// (L(v), phi) = sum_F ([v]^c_F, {phi}^g_F)_F for all broken phi of degree p.
/// Accepts vector inputs of degree <= p+1.
class LiftingOperator {
 public:
  LiftingOperator(const Mesh& mesh, int target_degree);

  int target_degree() const { return p_; }

  BrokenField lift(const BrokenField& v) const;

  /// Per-cell ratios ||L(v)||_K / (sum_{F in F_K} (p^2/h_K) ||[v]^c_F||_F^2)^{1/2};
  /// cells whose denominator vanishes are skipped.
  std::vector<double> bound_ratios(const BrokenField& v) const;

 private:
  const Mesh* mesh_;
  int p_;
};

}  // namespace curlrec
