// SPDX-License-Identifier: Apache-2.0
#include "curlrec/broken.hpp"

#include <iomanip>
#include <istream>
#include <ostream>

namespace curlrec {

BrokenField::BrokenField(const Mesh& mesh, int degree, int arity)
    : mesh_(&mesh),
      degree_(degree),
      arity_(arity),
      basis_(modal_basis(mesh, degree)),
      coeffs_(Eigen::VectorXd::Zero(mesh.num_cells() * arity * scalar_modes(degree))) {}

double BrokenField::eval_scalar(int cell, const Vec2& x) const {
  Eigen::VectorXd phi = basis_->eval(cell, x);
  return block(cell).head(phi.size()).dot(phi);
}

Vec2 BrokenField::eval_vector(int cell, const Vec2& x) const {
  Eigen::VectorXd phi = basis_->eval(cell, x);
  const int ns = static_cast<int>(phi.size());
  auto b = block(cell);
  return Vec2(b.head(ns).dot(phi), b.segment(ns, ns).dot(phi));
}

Eigen::Matrix2d BrokenField::eval_jacobian(int cell, const Vec2& x) const {
  Eigen::VectorXd dx, dy;
  basis_->eval_grad(cell, x, dx, dy);
  const int ns = static_cast<int>(dx.size());
  auto b = block(cell);
  Eigen::Matrix2d J = Eigen::Matrix2d::Zero();
  J(0, 0) = b.head(ns).dot(dx);
  J(0, 1) = b.head(ns).dot(dy);
  if (arity_ == 2) {
    J(1, 0) = b.segment(ns, ns).dot(dx);
    J(1, 1) = b.segment(ns, ns).dot(dy);
  }
  return J;
}

namespace {
int default_exactness(int p) { return 2 * p + 4; }
}  // namespace

BrokenField l2_project(const Mesh& mesh, const ScalarFn& f, int p, int quad) {
  if (quad < 0) quad = default_exactness(p);
  BrokenField g(mesh, p, 1);
  const int ns = scalar_modes(p);
  for (int k = 0; k < mesh.num_cells(); ++k) {
    CellQuad q = cell_quadrature(mesh, k, quad);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(ns);
    for (int i = 0; i < q.points.rows(); ++i) {
      Eigen::VectorXd phi = g.basis().eval(k, q.points.row(i));
      c += q.weights[i] * f(q.points.row(i)) * phi;
    }
    g.block(k) = c;
  }
  return g;
}

BrokenField l2_project(const Mesh& mesh, const VectorFn& f, int p, int quad) {
  if (quad < 0) quad = default_exactness(p);
  BrokenField g(mesh, p, 2);
  const int ns = scalar_modes(p);
  for (int k = 0; k < mesh.num_cells(); ++k) {
    CellQuad q = cell_quadrature(mesh, k, quad);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(2 * ns);
    for (int i = 0; i < q.points.rows(); ++i) {
      Eigen::VectorXd phi = g.basis().eval(k, q.points.row(i));
      Vec2 v = f(q.points.row(i));
      c.head(ns) += q.weights[i] * v.x() * phi;
      c.segment(ns, ns) += q.weights[i] * v.y() * phi;
    }
    g.block(k) = c;
  }
  return g;
}

BrokenField l2_project(const BrokenField& f, int p) {
  const Mesh& mesh = f.mesh();
  BrokenField g(mesh, p, f.arity());
  const int ns = scalar_modes(p);
  const int quad = f.degree() + p + 2;
  for (int k = 0; k < mesh.num_cells(); ++k) {
    CellQuad q = cell_quadrature(mesh, k, quad);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(f.arity() * ns);
    for (int i = 0; i < q.points.rows(); ++i) {
      Eigen::VectorXd phi = g.basis().eval(k, q.points.row(i));
      if (f.arity() == 1) {
        c += q.weights[i] * f.eval_scalar(k, q.points.row(i)) * phi;
      } else {
        Vec2 v = f.eval_vector(k, q.points.row(i));
        c.head(ns) += q.weights[i] * v.x() * phi;
        c.segment(ns, ns) += q.weights[i] * v.y() * phi;
      }
    }
    g.block(k) = c;
  }
  return g;
}

BrokenField curl_h(const BrokenField& v) {
  if (v.arity() != 2) throw std::invalid_argument("curl_h: vector field required");
  const Mesh& mesh = v.mesh();
  const int tp = std::max(v.degree() - 1, 0);
  BrokenField g(mesh, tp, 1);
  const int ns = scalar_modes(tp);
  for (int k = 0; k < mesh.num_cells(); ++k) {
    CellQuad q = cell_quadrature(mesh, k, v.degree() + tp);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(ns);
    for (int i = 0; i < q.points.rows(); ++i) {
      Eigen::Matrix2d J = v.eval_jacobian(k, q.points.row(i));
      double curl = J(1, 0) - J(0, 1);
      c += q.weights[i] * curl * g.basis().eval(k, q.points.row(i));
    }
    g.block(k) = c;
  }
  return g;
}

BrokenField rot_scalar(const BrokenField& phi) {
  if (phi.arity() != 1) throw std::invalid_argument("rot_scalar: scalar field required");
  const Mesh& mesh = phi.mesh();
  const int tp = std::max(phi.degree() - 1, 0);
  BrokenField g(mesh, tp, 2);
  const int ns = scalar_modes(tp);
  for (int k = 0; k < mesh.num_cells(); ++k) {
    CellQuad q = cell_quadrature(mesh, k, phi.degree() + tp);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(2 * ns);
    for (int i = 0; i < q.points.rows(); ++i) {
      Eigen::Matrix2d J = phi.eval_jacobian(k, q.points.row(i));
      Eigen::VectorXd b = g.basis().eval(k, q.points.row(i));
      c.head(ns) += q.weights[i] * J(0, 1) * b;        // d2 phi
      c.segment(ns, ns) += q.weights[i] * (-J(0, 0)) * b;  // -d1 phi
    }
    g.block(k) = c;
  }
  return g;
}

BrokenField div_h(const BrokenField& v) {
  if (v.arity() != 2) throw std::invalid_argument("div_h: vector field required");
  const Mesh& mesh = v.mesh();
  const int tp = std::max(v.degree() - 1, 0);
  BrokenField g(mesh, tp, 1);
  const int ns = scalar_modes(tp);
  for (int k = 0; k < mesh.num_cells(); ++k) {
    CellQuad q = cell_quadrature(mesh, k, v.degree() + tp);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(ns);
    for (int i = 0; i < q.points.rows(); ++i) {
      Eigen::Matrix2d J = v.eval_jacobian(k, q.points.row(i));
      c += q.weights[i] * (J(0, 0) + J(1, 1)) * g.basis().eval(k, q.points.row(i));
    }
    g.block(k) = c;
  }
  return g;
}

Eigen::VectorXd tangential_trace(const BrokenField& v, int cell, int edge,
                                 int npoints) {
  const Mesh& mesh = v.mesh();
  bool found = false;
  for (const auto& [e, sign] : mesh.cell_edges[cell])
    if (e == edge) found = true;
  if (!found) throw EdgeNotOnCell("edge not on cell");
  EdgeQuad q = edge_quadrature(mesh, edge, npoints);
  const Vec2 t = mesh.edges[edge].tangent;
  Eigen::VectorXd out(npoints);
  for (int i = 0; i < npoints; ++i)
    out[i] = v.eval_vector(cell, q.points.row(i)).dot(t);
  return out;
}

namespace {
template <typename F>
Eigen::VectorXd edge_combine(const Mesh& mesh, int edge, int npoints, F&& f) {
  const Edge& e = mesh.edges[edge];
  EdgeQuad q = edge_quadrature(mesh, edge, npoints);
  Eigen::VectorXd out(npoints);
  for (int i = 0; i < npoints; ++i) out[i] = f(e, Vec2(q.points.row(i)));
  return out;
}
}  // namespace

Eigen::VectorXd jump_c(const BrokenField& v, int edge, int npoints) {
  return edge_combine(v.mesh(), edge, npoints, [&](const Edge& e, const Vec2& x) {
    double l = v.eval_vector(e.left_cell, x).dot(e.tangent);
    if (e.is_boundary) return l;
    return l - v.eval_vector(e.right_cell, x).dot(e.tangent);
  });
}

Eigen::VectorXd jump_d(const BrokenField& v, int edge, int npoints) {
  return edge_combine(v.mesh(), edge, npoints, [&](const Edge& e, const Vec2& x) {
    double l = v.eval_vector(e.left_cell, x).dot(e.normal);
    if (e.is_boundary) return l;
    return l - v.eval_vector(e.right_cell, x).dot(e.normal);
  });
}

Eigen::Matrix<double, Eigen::Dynamic, 2> avg_g(const BrokenField& v, int edge,
                                               int npoints) {
  const Mesh& mesh = v.mesh();
  const Edge& e = mesh.edges[edge];
  EdgeQuad q = edge_quadrature(mesh, edge, npoints);
  Eigen::Matrix<double, Eigen::Dynamic, 2> out(npoints, 2);
  for (int i = 0; i < npoints; ++i) {
    Vec2 a = v.eval_vector(e.left_cell, q.points.row(i));
    if (!e.is_boundary)
      a = 0.5 * (a + v.eval_vector(e.right_cell, Vec2(q.points.row(i))));
    out.row(i) = a.transpose();
  }
  return out;
}

Eigen::VectorXd avg_scalar(const BrokenField& v, int edge, int npoints) {
  return edge_combine(v.mesh(), edge, npoints, [&](const Edge& e, const Vec2& x) {
    double l = v.eval_scalar(e.left_cell, x);
    if (e.is_boundary) return l;
    return 0.5 * (l + v.eval_scalar(e.right_cell, x));
  });
}

Eigen::VectorXd jump_scalar(const BrokenField& v, int edge, int npoints) {
  return edge_combine(v.mesh(), edge, npoints, [&](const Edge& e, const Vec2& x) {
    double l = v.eval_scalar(e.left_cell, x);
    if (e.is_boundary) return l;
    return l - v.eval_scalar(e.right_cell, x);
  });
}

Eigen::VectorXd scalar_jump_of_curl(const BrokenField& v, int edge, int npoints) {
  const Edge& e = v.mesh().edges[edge];
  if (e.is_boundary) return Eigen::VectorXd::Zero(npoints);
  return edge_combine(v.mesh(), edge, npoints, [&](const Edge& ed, const Vec2& x) {
    Eigen::Matrix2d Jl = v.eval_jacobian(ed.left_cell, x);
    Eigen::Matrix2d Jr = v.eval_jacobian(ed.right_cell, x);
    return (Jl(1, 0) - Jl(0, 1)) - (Jr(1, 0) - Jr(0, 1));
  });
}

BrokenField multiply_by_hat(const BrokenField& v, const VertexPatch& patch) {
  const Mesh& mesh = v.mesh();
  const int p = v.degree();
  BrokenField g(mesh, p + 1, v.arity());
  const int ns = scalar_modes(p + 1);
  for (int k : patch.cells) {
    CellQuad q = cell_quadrature(mesh, k, 2 * p + 4);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(v.arity() * ns);
    for (int i = 0; i < q.points.rows(); ++i) {
      double hat = patch.hat(mesh, k, q.points.row(i));
      Eigen::VectorXd phi = g.basis().eval(k, q.points.row(i));
      if (v.arity() == 1) {
        c += q.weights[i] * hat * v.eval_scalar(k, q.points.row(i)) * phi;
      } else {
        Vec2 val = v.eval_vector(k, q.points.row(i));
        c.head(ns) += q.weights[i] * hat * val.x() * phi;
        c.segment(ns, ns) += q.weights[i] * hat * val.y() * phi;
      }
    }
    g.block(k) = c;
  }
  return g;
}

double trace_inequality_ratio(const Mesh& mesh, int p) {
  // With the orthonormal modal basis the cell mass matrix is the identity, so
  // the squared ratio is the largest eigenvalue of the boundary Gram matrix.
  auto basis = modal_basis(mesh, p);
  const int ns = scalar_modes(p);
  double worst = 0.0;
  for (int k = 0; k < mesh.num_cells(); ++k) {
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(ns, ns);
    for (const auto& [e, sign] : mesh.cell_edges[k]) {
      EdgeQuad q = edge_quadrature(mesh, e, p + 2);
      for (int i = 0; i < q.points.rows(); ++i) {
        Eigen::VectorXd phi = basis->eval(k, q.points.row(i));
        B += q.weights[i] * phi * phi.transpose();
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B);
    double lam = es.eigenvalues().maxCoeff();
    double scaled = std::sqrt(lam) /
                    std::sqrt(double(p) * p / mesh.cell_diameter[k]);
    worst = std::max(worst, scaled);
  }
  return worst;
}

void write_field(std::ostream& os, const BrokenField& f) {
  os << "field " << f.degree() << ' ' << f.arity() << ' '
     << f.mesh().num_cells() << '\n';
  os << std::setprecision(17);
  const int bs = f.block_size();
  for (int k = 0; k < f.mesh().num_cells(); ++k) {
    auto b = f.block(k);
    for (int i = 0; i < bs; ++i) os << b[i] << (i + 1 < bs ? ' ' : '\n');
  }
}

BrokenField read_field(std::istream& is, const Mesh& mesh) {
  std::string tag;
  int p, arity, nc;
  if (!(is >> tag >> p >> arity >> nc) || tag != "field")
    throw std::runtime_error("bad field header");
  if (nc != mesh.num_cells())
    throw std::runtime_error("field/mesh cell count mismatch");
  BrokenField f(mesh, p, arity);
  for (int i = 0; i < f.coeffs().size(); ++i)
    if (!(is >> f.coeffs()[i])) throw std::runtime_error("truncated field data");
  return f;
}

}  // namespace curlrec
