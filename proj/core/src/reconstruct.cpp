// SPDX-License-Identifier: Apache-2.0
#include "curlrec/reconstruct.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <set>
#include <unordered_map>

namespace curlrec {

namespace {

int local_vertex(const Mesh& mesh, int cell, int v) {
  for (int i = 0; i < 3; ++i)
    if (mesh.cells[cell][i] == v) return i;
  return -1;
}

}  // namespace

NodalPatchSpace::NodalPatchSpace(const Mesh& mesh, const VertexPatch& patch,
                                 int q, bool zero_bc)
    : mesh_(&mesh), q_(q) {
  for (int i = 0; i + 3 <= q; ++i)
    for (int j = 0; i + j + 3 <= q; ++j) bubble_powers_.emplace_back(i, j);

  if (zero_bc) {
    if (!mesh.vertex_on_boundary[patch.vertex])
      dofs_.push_back({Kind::vertex, patch.vertex, 0});
    for (int e : patch.edges)
      if (!mesh.edges[e].is_boundary)
        for (int k = 1; k < q; ++k) dofs_.push_back({Kind::edge, e, k});
  } else {
    std::set<int> verts, edges;
    for (int k : patch.cells) {
      for (int v : mesh.cells[k]) verts.insert(v);
      for (const auto& [e, sign] : mesh.cell_edges[k]) edges.insert(e);
    }
    verts.erase(verts.begin());  // pin one vertex value: fixes the constant
    for (int v : verts) dofs_.push_back({Kind::vertex, v, 0});
    for (int e : edges)
      for (int k = 1; k < q; ++k) dofs_.push_back({Kind::edge, e, k});
  }
  for (int k : patch.cells)
    for (int j = 0; j < static_cast<int>(bubble_powers_.size()); ++j)
      dofs_.push_back({Kind::cell, k, j});
}

double NodalPatchSpace::value(int dof, int cell, const Vec2& x) const {
  const Dof& d = dofs_[dof];
  const Mesh& mesh = *mesh_;
  switch (d.kind) {
    case Kind::vertex: {
      int l = local_vertex(mesh, cell, d.id);
      return l < 0 ? 0.0 : mesh.barycentric(cell, x)[l];
    }
    case Kind::edge: {
      const Edge& e = mesh.edges[d.id];
      int la = local_vertex(mesh, cell, e.v0);
      int lb = local_vertex(mesh, cell, e.v1);
      if (la < 0 || lb < 0) return 0.0;
      Eigen::Vector3d lam = mesh.barycentric(cell, x);
      return edge_bubble(lam[la], lam[lb], d.k);
    }
    case Kind::cell: {
      if (d.id != cell) return 0.0;
      Eigen::Vector3d lam = mesh.barycentric(cell, x);
      auto [i, j] = bubble_powers_[d.k];
      const auto& c = mesh.cells[cell];
      Vec2 ctr = (mesh.vertices[c[0]] + mesh.vertices[c[1]] + mesh.vertices[c[2]]) / 3.0;
      double s = mesh.cell_diameter[cell] / 2.0;
      double xi = (x.x() - ctr.x()) / s, up = (x.y() - ctr.y()) / s;
      return lam[0] * lam[1] * lam[2] * legendre(i, xi) * legendre(j, up);
    }
  }
  return 0.0;
}

Vec2 NodalPatchSpace::gradient(int dof, int cell, const Vec2& x) const {
  const Dof& d = dofs_[dof];
  const Mesh& mesh = *mesh_;
  switch (d.kind) {
    case Kind::vertex: {
      int l = local_vertex(mesh, cell, d.id);
      return l < 0 ? Vec2::Zero() : mesh.barycentric_gradient(cell, l);
    }
    case Kind::edge: {
      const Edge& e = mesh.edges[d.id];
      int la = local_vertex(mesh, cell, e.v0);
      int lb = local_vertex(mesh, cell, e.v1);
      if (la < 0 || lb < 0) return Vec2::Zero();
      Eigen::Vector3d lam = mesh.barycentric(cell, x);
      return edge_bubble_gradient(lam[la], lam[lb],
                                  mesh.barycentric_gradient(cell, la),
                                  mesh.barycentric_gradient(cell, lb), d.k);
    }
    case Kind::cell: {
      if (d.id != cell) return Vec2::Zero();
      Eigen::Vector3d lam = mesh.barycentric(cell, x);
      std::array<Vec2, 3> g;
      for (int i = 0; i < 3; ++i) g[i] = mesh.barycentric_gradient(cell, i);
      auto [i, j] = bubble_powers_[d.k];
      const auto& c = mesh.cells[cell];
      Vec2 ctr = (mesh.vertices[c[0]] + mesh.vertices[c[1]] + mesh.vertices[c[2]]) / 3.0;
      double s = mesh.cell_diameter[cell] / 2.0;
      double xi = (x.x() - ctr.x()) / s, up = (x.y() - ctr.y()) / s;
      double B = lam[0] * lam[1] * lam[2];
      Vec2 gB = lam[1] * lam[2] * g[0] + lam[0] * lam[2] * g[1] +
                lam[0] * lam[1] * g[2];
      double L = legendre(i, xi) * legendre(j, up);
      Vec2 gL(legendre_deriv(i, xi) * legendre(j, up) / s,
              legendre(i, xi) * legendre_deriv(j, up) / s);
      return gB * L + B * gL;
    }
  }
  return Vec2::Zero();
}

PatchSpaces::PatchSpaces(const Mesh& mesh, const VertexPatch& patch, int q)
    : mesh_(&mesh),
      patch_(patch),
      q_(q),
      space_(nedelec_space(mesh, q)),
      nodal0_(mesh, patch, q, true) {
  for (int e : patch.edges)
    if (!mesh.edges[e].is_boundary) active_edges_.push_back(e);

  std::unordered_map<int, int> g2l;
  for (int e : active_edges_)
    for (int k = 0; k < q; ++k) {
      g2l[space_->edge_dof(e, k)] = static_cast<int>(global_dof_.size());
      global_dof_.push_back(space_->edge_dof(e, k));
    }
  for (int c : patch.cells)
    for (int j = 0; j < q * (q - 1); ++j) {
      g2l[space_->interior_dof(c, j)] = static_cast<int>(global_dof_.size());
      global_dof_.push_back(space_->interior_dof(c, j));
    }

  cell_dofs_.resize(patch.cells.size());
  for (std::size_t t = 0; t < patch.cells.size(); ++t) {
    const CellNedelec& el = space_->cell(patch.cells[t]);
    for (int l = 0; l < el.ndof(); ++l) {
      auto it = g2l.find(space_->cell_dof(patch.cells[t], l));
      if (it != g2l.end()) cell_dofs_[t].emplace_back(it->second, l);
    }
  }
}

Eigen::VectorXd PatchSpaces::grad_to_nedelec(const Eigen::VectorXd& theta) const {
  const Mesh& mesh = *mesh_;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n_dofs());
  std::unordered_map<int, int> edge_pos;  // active edge -> position
  for (std::size_t i = 0; i < active_edges_.size(); ++i)
    edge_pos[active_edges_[i]] = static_cast<int>(i);
  std::unordered_map<int, int> cell_pos;
  for (std::size_t t = 0; t < patch_.cells.size(); ++t)
    cell_pos[patch_.cells[t]] = static_cast<int>(t);

  const int nint = q_ * (q_ - 1);
  const int edge_block = static_cast<int>(active_edges_.size()) * q_;
  const auto& dofs = nodal0_.dofs();
  for (int i = 0; i < nodal0_.size(); ++i) {
    double th = theta.size() > 0 ? theta[i] : 0.0;
    if (th == 0.0) continue;
    const auto& d = dofs[i];
    switch (d.kind) {
      case NodalPatchSpace::Kind::vertex:
        // grad(lambda_a) = -sum of Whitney functions oriented away from a
        for (std::size_t epos = 0; epos < active_edges_.size(); ++epos) {
          const Edge& e = mesh.edges[active_edges_[epos]];
          double sign = (d.id == e.v0) ? -1.0 : 1.0;
          out[static_cast<int>(epos) * q_ + 0] += sign * th;
        }
        break;
      case NodalPatchSpace::Kind::edge:
        out[edge_pos.at(d.id) * q_ + d.k] += th;
        break;
      case NodalPatchSpace::Kind::cell: {
        // project grad(cell bubble) onto the orthonormal interior functions
        int t = cell_pos.at(d.id);
        const CellNedelec& el = space_->cell(d.id);
        CellQuad cq = cell_quadrature(mesh, d.id, 2 * q_ + 2);
        Eigen::VectorXd proj = Eigen::VectorXd::Zero(nint);
        Eigen::Matrix<double, Eigen::Dynamic, 2> vals;
        Eigen::VectorXd curls;
        for (int pt = 0; pt < cq.points.rows(); ++pt) {
          Vec2 x = cq.points.row(pt);
          Vec2 g = nodal0_.gradient(i, d.id, x);
          el.eval_all(x, vals, curls);
          proj += cq.weights[pt] * (vals.bottomRows(nint) * g);
        }
        int base = edge_block + t * nint;
        out.segment(base, nint) += th * proj;
        break;
      }
    }
  }
  return out;
}

Vec2 PatchSpaces::eval(const Eigen::VectorXd& coeffs, int cell,
                       const Vec2& x) const {
  auto it = std::lower_bound(patch_.cells.begin(), patch_.cells.end(), cell);
  if (it == patch_.cells.end() || *it != cell) return Vec2::Zero();
  int t = static_cast<int>(it - patch_.cells.begin());
  const CellNedelec& el = space_->cell(cell);
  Vec2 v = Vec2::Zero();
  for (const auto& [loc, l] : cell_dofs_[t]) v += coeffs[loc] * el.eval(l, x);
  return v;
}

double PatchSpaces::eval_curl(const Eigen::VectorXd& coeffs, int cell,
                              const Vec2& x) const {
  auto it = std::lower_bound(patch_.cells.begin(), patch_.cells.end(), cell);
  if (it == patch_.cells.end() || *it != cell) return 0.0;
  int t = static_cast<int>(it - patch_.cells.begin());
  const CellNedelec& el = space_->cell(cell);
  double c = 0.0;
  for (const auto& [loc, l] : cell_dofs_[t]) c += coeffs[loc] * el.curl(l, x);
  return c;
}

namespace {

struct PatchSystem {
  Eigen::MatrixXd A;  // curl-curl on N_{q,0}
  Eigen::MatrixXd B;  // (W, grad v) coupling to S_{q,0}
  Eigen::VectorXd r;  // (rhs, curl W)
};

PatchSystem assemble_patch(const PatchSpaces& ps,
                           const std::function<double(int, const Vec2&)>* rhs) {
  const Mesh& mesh = ps.mesh();
  const int n = ps.n_dofs();
  const int m = ps.nodal().size();
  const int q = ps.degree();
  PatchSystem sys;
  sys.A = Eigen::MatrixXd::Zero(n, n);
  sys.B = Eigen::MatrixXd::Zero(m, n);
  sys.r = Eigen::VectorXd::Zero(n);

  Eigen::Matrix<double, Eigen::Dynamic, 2> vals;
  Eigen::VectorXd curls;
  const auto& cells = ps.patch().cells;
  for (std::size_t t = 0; t < cells.size(); ++t) {
    int k = cells[t];
    const CellNedelec& el = ps.space().cell(k);
    const auto& cd = ps.cell_dofs()[t];
    CellQuad cq = cell_quadrature(mesh, k, 2 * q + 4);
    for (int pt = 0; pt < cq.points.rows(); ++pt) {
      Vec2 x = cq.points.row(pt);
      double w = cq.weights[pt];
      el.eval_all(x, vals, curls);
      double f = rhs ? (*rhs)(k, x) : 0.0;
      std::vector<Vec2> g(m);
      for (int v = 0; v < m; ++v) g[v] = ps.nodal().gradient(v, k, x);
      for (const auto& [i1, l1] : cd) {
        for (const auto& [i2, l2] : cd)
          sys.A(i1, i2) += w * curls[l1] * curls[l2];
        if (rhs) sys.r[i1] += w * f * curls[l1];
        for (int v = 0; v < m; ++v)
          sys.B(v, i1) += w * vals.row(l1).dot(g[v]);
      }
    }
  }
  return sys;
}

}  // namespace

Eigen::VectorXd solve_patch_curl(
    const PatchSpaces& ps, const std::function<double(int, const Vec2&)>& rhs,
    double* residual, Eigen::VectorXd* multiplier, double* div_residual) {
  const int n = ps.n_dofs();
  const int m = ps.nodal().size();
  if (n == 0) {
    if (residual) *residual = 0.0;
    if (div_residual) *div_residual = 0.0;
    if (multiplier) multiplier->resize(0);
    return Eigen::VectorXd();
  }
  PatchSystem sys = assemble_patch(ps, &rhs);
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + m, n + m);
  K.topLeftCorner(n, n) = sys.A;
  K.bottomLeftCorner(m, n) = sys.B;
  K.topRightCorner(n, m) = sys.B.transpose();
  Eigen::VectorXd f = Eigen::VectorXd::Zero(n + m);
  f.head(n) = sys.r;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
  if (!lu.isInvertible())
    throw SingularPatch("patch saddle-point system is singular");
  Eigen::VectorXd z = lu.solve(f);
  double rel = (K * z - f).norm() / std::max(f.norm(), 1e-300);
  if (f.norm() == 0.0) rel = 0.0;
  if (rel > 1e-8) throw SingularPatch("patch saddle-point solve lost accuracy");
  if (residual) *residual = rel;
  if (multiplier) *multiplier = z.tail(m);
  Eigen::VectorXd U = z.head(n);
  if (div_residual)
    *div_residual = m == 0 ? 0.0 : (sys.B * U).lpNorm<Eigen::Infinity>();
  return U;
}

Eigen::VectorXd solve_patch_poisson(const PatchSpaces& ps,
                                    const BrokenField& E_h) {
  const Mesh& mesh = ps.mesh();
  const int m = ps.nodal().size();
  if (m == 0) return Eigen::VectorXd();
  const int q = ps.degree();
  BrokenField psiE = multiply_by_hat(E_h, ps.patch());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd r = Eigen::VectorXd::Zero(m);
  const int ex = 2 * std::max(q, E_h.degree() + 1) + 4;
  for (int k : ps.patch().cells) {
    CellQuad cq = cell_quadrature(mesh, k, ex);
    for (int pt = 0; pt < cq.points.rows(); ++pt) {
      Vec2 x = cq.points.row(pt);
      double w = cq.weights[pt];
      Vec2 val = psiE.eval_vector(k, x);
      std::vector<Vec2> g(m);
      for (int i = 0; i < m; ++i) g[i] = ps.nodal().gradient(i, k, x);
      for (int i = 0; i < m; ++i) {
        for (int j = 0; j <= i; ++j) A(i, j) += w * g[i].dot(g[j]);
        r[i] += w * val.dot(g[i]);
      }
    }
  }
  A = A.selfadjointView<Eigen::Lower>();
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success)
    throw SingularPatch("patch Poisson system is not SPD");
  return llt.solve(r);
}

PatchSolution solve_patch(const PatchSpaces& ps, const BrokenField& E_h,
                          const LiftingOperator& lifting) {
  BrokenField psiE = multiply_by_hat(E_h, ps.patch());
  BrokenField curl_psiE = curl_h(psiE);
  BrokenField lifted = lifting.lift(psiE);
  auto rhs = [&](int cell, const Vec2& x) {
    // Distributional curl of the hat-weighted field: under the
    // left-minus-right jump convention the jump lifting enters with a minus
    // sign (same orientation bookkeeping as in the dG consistency terms).
    return curl_psiE.eval_scalar(cell, x) - lifted.eval_scalar(cell, x);
  };
  PatchSolution sol;
  sol.U = solve_patch_curl(ps, rhs, &sol.curl_residual, &sol.multiplier,
                           &sol.divergence_residual);
  sol.theta = solve_patch_poisson(ps, E_h);
  sol.E = sol.U;
  if (sol.E.size() == 0) sol.E = Eigen::VectorXd::Zero(ps.n_dofs());
  sol.E += ps.grad_to_nedelec(sol.theta);
  return sol;
}

ConformingField::ConformingField(const Mesh& mesh, int q)
    : mesh_(&mesh), q_(q), space_(nedelec_space(mesh, q)) {
  coeffs_ = Eigen::VectorXd::Zero(space_->ndof());
}

Vec2 ConformingField::eval(int cell, const Vec2& x) const {
  const CellNedelec& el = space_->cell(cell);
  Vec2 v = Vec2::Zero();
  for (int l = 0; l < el.ndof(); ++l) {
    double c = coeffs_[space_->cell_dof(cell, l)];
    if (c != 0.0) v += c * el.eval(l, x);
  }
  return v;
}

double ConformingField::curl(int cell, const Vec2& x) const {
  const CellNedelec& el = space_->cell(cell);
  double v = 0.0;
  for (int l = 0; l < el.ndof(); ++l) {
    double c = coeffs_[space_->cell_dof(cell, l)];
    if (c != 0.0) v += c * el.curl(l, x);
  }
  return v;
}

ConformingField reconstruct(const BrokenField& E_h, int q) {
  const Mesh& mesh = E_h.mesh();
  if (q < E_h.degree() + 1)
    throw std::invalid_argument("reconstruction degree must be >= p + 1");
  ConformingField out(mesh, q);
  LiftingOperator lifting(mesh, E_h.degree());
  for (int a = 0; a < mesh.num_vertices(); ++a) {
    VertexPatch patch = vertex_patch(mesh, a);
    PatchSpaces ps(mesh, patch, q);
    if (ps.n_dofs() == 0) continue;
    PatchSolution sol = solve_patch(ps, E_h, lifting);
    for (int i = 0; i < ps.n_dofs(); ++i)
      out.coeffs()[ps.global_dof()[i]] += sol.E[i];
  }
  return out;
}

double conformity_defect(const ConformingField& f) {
  const Mesh& mesh = f.mesh();
  const int np = f.degree() + 3;
  double worst = 0.0;
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const Edge& ed = mesh.edges[e];
    EdgeQuad q = edge_quadrature(mesh, e, np);
    for (int i = 0; i < np; ++i) {
      Vec2 x = q.points.row(i);
      double left = f.eval(ed.left_cell, x).dot(ed.tangent);
      double right = ed.is_boundary ? 0.0 : f.eval(ed.right_cell, x).dot(ed.tangent);
      worst = std::max(worst, std::abs(left - right));
    }
  }
  return worst;
}

TheoremRatios theorem_ratios(const BrokenField& E_h, const ConformingField& E_c) {
  const Mesh& mesh = E_h.mesh();
  const int p = E_h.degree();
  const double pbar = std::max(p, 1);
  const int np = edge_points(std::max(p, E_c.degree()));
  TheoremRatios tr;

  double num_curl2 = 0.0, num_l22 = 0.0, den_curl2 = 0.0, den_l22 = 0.0;
  BrokenField curlE = curl_h(E_h);
  for (int k = 0; k < mesh.num_cells(); ++k) {
    CellQuad cq = cell_quadrature(mesh, k, 2 * std::max(p, E_c.degree()) + 4);
    for (int i = 0; i < cq.points.rows(); ++i) {
      Vec2 x = cq.points.row(i);
      double dc = E_c.curl(k, x) - curlE.eval_scalar(k, x);
      num_curl2 += cq.weights[i] * dc * dc;
      num_l22 += cq.weights[i] * (E_c.eval(k, x) - E_h.eval_vector(k, x)).squaredNorm();
    }
    const double h = mesh.cell_diameter[k];
    for (const auto& [e, sign] : mesh.cell_edges[k]) {
      EdgeQuad eq = edge_quadrature(mesh, e, np);
      double jc = jump_c(E_h, e, np).cwiseAbs2().dot(eq.weights);
      den_curl2 += (pbar * pbar / h) * jc;
      den_l22 += h * jc;
      if (!mesh.edges[e].is_boundary) {
        double jr = scalar_jump_of_curl(E_h, e, np).cwiseAbs2().dot(eq.weights);
        den_curl2 += (h / pbar) * jr;
      }
    }
  }
  tr.num_curl = std::sqrt(num_curl2);
  tr.num_l2 = std::sqrt(num_l22);
  tr.den_curl = std::sqrt(den_curl2);
  tr.den_l2 = std::sqrt(den_l22);
  const double tol = 1e-12 * (1.0 + E_h.norm());
  tr.conforming_input = tr.den_l2 < tol;
  tr.ratio_curl = tr.den_curl < tol ? 0.0 : tr.num_curl / tr.den_curl;
  tr.ratio_l2 = tr.den_l2 < tol ? 0.0 : tr.num_l2 / tr.den_l2;
  return tr;
}

HelmholtzResult helmholtz_check(const Mesh& mesh, const VertexPatch& patch,
                                const BrokenField& v, int q) {
  NodalPatchSpace S(mesh, patch, q, false);
  const int m = S.size();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd r = Eigen::VectorXd::Zero(m);
  const int ex = 2 * std::max(q, v.degree()) + 4;
  for (int k : patch.cells) {
    CellQuad cq = cell_quadrature(mesh, k, ex);
    for (int pt = 0; pt < cq.points.rows(); ++pt) {
      Vec2 x = cq.points.row(pt);
      double w = cq.weights[pt];
      Vec2 val = v.eval_vector(k, x);
      std::vector<Vec2> g(m);
      for (int i = 0; i < m; ++i) g[i] = S.gradient(i, k, x);
      for (int i = 0; i < m; ++i) {
        for (int j = 0; j <= i; ++j) A(i, j) += w * g[i].dot(g[j]);
        r[i] += w * val.dot(g[i]);
      }
    }
  }
  A = A.selfadjointView<Eigen::Lower>();
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success)
    throw SingularPatch("patch Neumann system is not SPD");
  Eigen::VectorXd xi = llt.solve(r);

  HelmholtzResult res;
  res.residual = (A * xi - r).lpNorm<Eigen::Infinity>();
  double n_v = 0.0, n_diff = 0.0, n_grad = 0.0;
  for (int k : patch.cells) {
    CellQuad cq = cell_quadrature(mesh, k, ex);
    for (int pt = 0; pt < cq.points.rows(); ++pt) {
      Vec2 x = cq.points.row(pt);
      double w = cq.weights[pt];
      Vec2 val = v.eval_vector(k, x);
      Vec2 grad = Vec2::Zero();
      for (int i = 0; i < m; ++i) grad += xi[i] * S.gradient(i, k, x);
      n_v += w * val.squaredNorm();
      n_diff += w * (val - grad).squaredNorm();
      n_grad += w * grad.squaredNorm();
    }
  }
  res.defect = std::abs(n_v - n_diff - n_grad);
  res.grad_norm = std::sqrt(n_grad);
  return res;
}

PoincareResult poincare_ratio(const Mesh& mesh, const VertexPatch& patch,
                              const BrokenField& E_h, int q) {
  PatchSpaces ps(mesh, patch, q);
  LiftingOperator lifting(mesh, E_h.degree());
  PatchSolution sol = solve_patch(ps, E_h, lifting);
  BrokenField psiE = multiply_by_hat(E_h, patch);
  BrokenField curl_psiE = curl_h(psiE);

  const int ex = 2 * std::max(q, E_h.degree() + 1) + 4;
  double num2 = 0.0, curl2 = 0.0;
  for (int k : patch.cells) {
    CellQuad cq = cell_quadrature(mesh, k, ex);
    for (int pt = 0; pt < cq.points.rows(); ++pt) {
      Vec2 x = cq.points.row(pt);
      double w = cq.weights[pt];
      Vec2 diff = ps.eval(sol.E, k, x) - psiE.eval_vector(k, x);
      num2 += w * diff.squaredNorm();
      double dc = ps.eval_curl(sol.E, k, x) - curl_psiE.eval_scalar(k, x);
      curl2 += w * dc * dc;
    }
  }
  double jump2 = 0.0;
  const int np = edge_points(E_h.degree() + 1);
  for (int e : patch.edges) {
    EdgeQuad eq = edge_quadrature(mesh, e, np);
    jump2 += jump_c(psiE, e, np).cwiseAbs2().dot(eq.weights) /
             mesh.edges[e].length;
  }
  PoincareResult res;
  res.numerator = std::sqrt(num2);
  res.denominator = patch.diameter * std::sqrt(curl2 + jump2);
  if (res.denominator < 1e-13 * (1.0 + E_h.norm()))
    res.conforming = true;
  else
    res.ratio = res.numerator / res.denominator;
  return res;
}

void write_conforming(std::ostream& os, const ConformingField& f) {
  os << "nedelec " << f.degree() << ' ' << f.coeffs().size() << '\n';
  os.precision(17);
  for (int i = 0; i < f.coeffs().size(); ++i) os << f.coeffs()[i] << '\n';
}

ConformingField read_conforming(std::istream& is, const Mesh& mesh) {
  std::string tag;
  int q = 0;
  long n = 0;
  if (!(is >> tag >> q >> n) || tag != "nedelec")
    throw std::runtime_error("bad conforming-field header");
  ConformingField f(mesh, q);
  if (n != f.coeffs().size())
    throw std::runtime_error("conforming-field size does not match mesh");
  for (long i = 0; i < n; ++i)
    if (!(is >> f.coeffs()[i]))
      throw std::runtime_error("truncated conforming-field data");
  return f;
}

}  // namespace curlrec
