// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "curlrec/dg.hpp"

namespace curlrec {

/// A manufactured problem: source term (with analytic divergence) and, when
/// available, the exact solution. Constant materials eps = nu = 1 at a given
/// frequency.
struct Manufactured {
  std::string name;
  bool has_exact = false;
  ExactField exact;   // valid only when has_exact
  SourceTerm source;
};

/// Gallery:
///  - "poly2": E = (y(1-y), x(1-x)) on the unit square; degree-2 polynomial,
///    zero tangential boundary trace; discrete-exact for p >= 2.
///  - "trig": E = sin(pi x) sin(pi y) (1,1) on the unit square; smooth,
///    non-polynomial, zero tangential boundary trace.
///  - "lshape": constant source (1,1) on the L-shaped domain; no exact
///    solution (singular at the reentrant corner), indicator-only studies.
Manufactured manufactured_case(const std::string& name, double omega);

}  // namespace curlrec
