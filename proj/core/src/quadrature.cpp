// SPDX-License-Identifier: Apache-2.0
#include "curlrec/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace curlrec {

double legendre(int k, double x) {
  if (k == 0) return 1.0;
  double pm = 1.0, p = x;
  for (int n = 1; n < k; ++n) {
    double pn = ((2 * n + 1) * x * p - n * pm) / (n + 1);
    pm = p;
    p = pn;
  }
  return p;
}

double legendre_deriv(int k, double x) {
  if (k == 0) return 0.0;
  // (1-x^2) P_k' = k (P_{k-1} - x P_k)
  double den = 1.0 - x * x;
  if (std::abs(den) > 1e-10)
    return k * (legendre(k - 1, x) - x * legendre(k, x)) / den;
  // endpoint values
  double sign = (x > 0 || k % 2 == 1) ? 1.0 : -1.0;
  return sign * 0.5 * k * (k + 1);
}

namespace {

// Gauss-Legendre nodes/weights on [-1,1] via Newton iteration.
void gauss_legendre(int n, Eigen::VectorXd& x, Eigen::VectorXd& w) {
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double f = legendre(n, t);
      double df = legendre_deriv(n, t);
      double dt = -f / df;
      t += dt;
      if (std::abs(dt) < 1e-15) break;
    }
    double df = legendre_deriv(n, t);
    x[i] = t;
    w[i] = 2.0 / ((1.0 - t * t) * df * df);
  }
}

// Gauss-Jacobi (alpha=1, beta=0) nodes/weights on [-1,1] for weight (1-x),
// via Golub-Welsch on the symmetric tridiagonal Jacobi matrix.
void gauss_jacobi10(int n, Eigen::VectorXd& x, Eigen::VectorXd& w) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    J(k, k) = -1.0 / ((2.0 * k + 1.0) * (2.0 * k + 3.0));
    if (k >= 1) {
      double beta = k * (k + 1.0) / ((2.0 * k + 1.0) * (2.0 * k + 1.0));
      J(k, k - 1) = J(k - 1, k) = std::sqrt(beta);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  x = es.eigenvalues();
  w.resize(n);
  const double mu0 = 2.0;  // integral of (1-x) over [-1,1]
  for (int i = 0; i < n; ++i) {
    double v0 = es.eigenvectors()(0, i);
    w[i] = mu0 * v0 * v0;
  }
}

QuadratureRule make_triangle_rule(int exactness) {
  int q = std::max(exactness, 1);
  int n = q / 2 + 1;  // 2n >= q+1 in each collapsed direction
  Eigen::VectorXd xa, wa, xb, wb;
  gauss_legendre(n, xa, wa);
  gauss_jacobi10(n, xb, wb);
  QuadratureRule rule;
  rule.points.resize(n * n, 2);
  rule.weights.resize(n * n);
  rule.exactness = exactness;
  int idx = 0;
  for (int i = 0; i < n; ++i) {
    double a = 0.5 * (xa[i] + 1.0);  // [0,1]
    for (int j = 0; j < n; ++j) {
      double b = 0.5 * (xb[j] + 1.0);
      rule.points(idx, 0) = a * (1.0 - b);
      rule.points(idx, 1) = b;
      // dx dy = (1-b) da db; GL weight maps with 1/2, GJ with 1/4
      rule.weights[idx] = (wa[i] * 0.5) * (wb[j] * 0.25);
      ++idx;
    }
  }
  return rule;
}

QuadratureRule make_segment_rule(int n) {
  Eigen::VectorXd x, w;
  gauss_legendre(n, x, w);
  QuadratureRule rule;
  rule.points.resize(n, 2);
  rule.weights.resize(n);
  rule.exactness = 2 * n - 1;
  for (int i = 0; i < n; ++i) {
    rule.points(i, 0) = 0.5 * (x[i] + 1.0);
    rule.points(i, 1) = 0.0;
    rule.weights[i] = 0.5 * w[i];
  }
  return rule;
}

}  // namespace

const QuadratureRule& triangle_rule(int exactness) {
  static std::mutex mtx;
  static std::map<int, QuadratureRule> cache;
  std::scoped_lock lock(mtx);
  auto it = cache.find(exactness);
  if (it == cache.end())
    it = cache.emplace(exactness, make_triangle_rule(exactness)).first;
  return it->second;
}

const QuadratureRule& segment_rule(int npoints) {
  if (npoints < 1) throw std::invalid_argument("segment_rule: npoints < 1");
  static std::mutex mtx;
  static std::map<int, QuadratureRule> cache;
  std::scoped_lock lock(mtx);
  auto it = cache.find(npoints);
  if (it == cache.end())
    it = cache.emplace(npoints, make_segment_rule(npoints)).first;
  return it->second;
}

}  // namespace curlrec
