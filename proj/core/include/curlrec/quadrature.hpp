// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

namespace curlrec {

/// Quadrature points and weights on a reference element.
/// Triangle rules live on the unit triangle {x,y >= 0, x+y <= 1},
/// segment rules on [0,1].
struct QuadratureRule {
  Eigen::Matrix<double, Eigen::Dynamic, 2> points;  // one row per point
  Eigen::VectorXd weights;
  int exactness = 0;  // integrates all monomials of total degree <= exactness
};

/// Collapsed Gauss-Legendre x Gauss-Jacobi product rule on the unit triangle,
/// exact for total degree <= exactness.
const QuadratureRule& triangle_rule(int exactness);

/// Gauss-Legendre rule on [0,1] with n points (exact for degree <= 2n-1).
const QuadratureRule& segment_rule(int npoints);

/// Legendre polynomial P_k and derivative on [-1,1].
double legendre(int k, double x);
double legendre_deriv(int k, double x);

}  // namespace curlrec
