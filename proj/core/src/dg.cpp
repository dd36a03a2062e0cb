// SPDX-License-Identifier: Apache-2.0
#include "curlrec/dg.hpp"

#include <iomanip>
#include <ostream>

namespace curlrec {

MaterialModel MaterialModel::constant(const Mesh& mesh, double eps, double nu,
                                      double omega) {
  MaterialModel m;
  m.eps = Eigen::VectorXd::Constant(mesh.num_cells(), eps);
  m.nu = Eigen::VectorXd::Constant(mesh.num_cells(), nu);
  m.omega = omega;
  return m;
}

double MaterialModel::eps_sharp(const Mesh& mesh, int edge) const {
  const Edge& e = mesh.edges[edge];
  double v = eps[e.left_cell];
  if (!e.is_boundary) v = std::max(v, eps[e.right_cell]);
  return v;
}

double MaterialModel::nu_sharp(const Mesh& mesh, int edge) const {
  const Edge& e = mesh.edges[edge];
  double v = nu[e.left_cell];
  if (!e.is_boundary) v = std::max(v, nu[e.right_cell]);
  return v;
}

double penalty_weight(const Mesh& mesh, const MaterialModel& mat, int edge, int p) {
  return mat.nu_sharp(mesh, edge) * double(p) * p / mesh.edges[edge].length;
}

BrokenField random_field(const Mesh& mesh, int p, int arity, std::mt19937_64& rng) {
  BrokenField f(mesh, p, arity);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int i = 0; i < f.coeffs().size(); ++i) f.coeffs()[i] = dist(rng);
  return f;
}

double measure_lifting_constant(const Mesh& mesh, const MaterialModel& mat,
                                int p, int samples, unsigned seed) {
  (void)mat;
  LiftingOperator L(mesh, p);
  std::mt19937_64 rng(seed);
  double cmax = 0.0;
  for (int s = 0; s < samples; ++s) {
    BrokenField v = random_field(mesh, p, 2, rng);
    for (double r : L.bound_ratios(v)) cmax = std::max(cmax, r);
  }
  return cmax;
}

double auto_eta_star(const Mesh& mesh, const MaterialModel& mat, int p) {
  double c = measure_lifting_constant(mesh, mat, p);
  return std::max(10.0, 0.5 + 2.0 * c * c * 1.5);
}

namespace {

// Per-side edge data: tangential traces and nu-weighted curls of all local
// vector dofs at the edge quadrature points.
struct SideTrace {
  Eigen::MatrixXd tang;   // npts x 2ns
  Eigen::MatrixXd ncurl;  // npts x 2ns
};

SideTrace side_trace(const Mesh& mesh, const ModalBasis& basis,
                     const MaterialModel& mat, int cell, const EdgeQuad& q,
                     const Vec2& t) {
  const int ns = basis.modes();
  const int npts = static_cast<int>(q.points.rows());
  SideTrace st;
  st.tang.resize(npts, 2 * ns);
  st.ncurl.resize(npts, 2 * ns);
  for (int i = 0; i < npts; ++i) {
    Eigen::VectorXd phi = basis.eval(cell, q.points.row(i));
    Eigen::VectorXd dx, dy;
    basis.eval_grad(cell, q.points.row(i), dx, dy);
    st.tang.row(i).head(ns) = (t.x() * phi).transpose();
    st.tang.row(i).tail(ns) = (t.y() * phi).transpose();
    st.ncurl.row(i).head(ns) = (-mat.nu[cell] * dy).transpose();
    st.ncurl.row(i).tail(ns) = (mat.nu[cell] * dx).transpose();
  }
  return st;
}

DGSystem assemble_impl(const Mesh& mesh, const MaterialModel& mat,
                       DGConfig config, const SourceTerm* source) {
  if (config.p < 1) throw DegreeTooLow("dG solver requires p >= 1");
  const int p = config.p;
  if (config.eta_star < 0) config.eta_star = auto_eta_star(mesh, mat, p);

  auto basis = modal_basis(mesh, p);
  const int ns = scalar_modes(p);
  const int bs = 2 * ns;
  const int n = mesh.num_cells() * bs;

  DGSystem sys;
  sys.mesh = &mesh;
  sys.materials = mat;
  sys.config = config;
  sys.rhs = Eigen::VectorXd::Zero(n);

  std::vector<Eigen::Triplet<double>> trip;

  // Volume terms: mass (identity blocks) and curl-curl.
  for (int k = 0; k < mesh.num_cells(); ++k) {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(bs, bs);
    double mass = mat.omega * mat.omega * mat.eps[k];
    A.diagonal().setConstant(mass);
    CellQuad q = cell_quadrature(mesh, k, 2 * p + 4);
    for (int i = 0; i < q.points.rows(); ++i) {
      Eigen::VectorXd dx, dy;
      basis->eval_grad(k, q.points.row(i), dx, dy);
      Eigen::VectorXd curl(bs);
      curl.head(ns) = -dy;
      curl.tail(ns) = dx;
      A += (mat.nu[k] * q.weights[i]) * curl * curl.transpose();
    }
    for (int i = 0; i < bs; ++i)
      for (int j = 0; j < bs; ++j)
        if (A(i, j) != 0.0) trip.emplace_back(k * bs + i, k * bs + j, A(i, j));

    if (source) {
      CellQuad qs = cell_quadrature(mesh, k, 2 * p + 8);
      for (int i = 0; i < qs.points.rows(); ++i) {
        Eigen::VectorXd phi = basis->eval(k, qs.points.row(i));
        Vec2 J = source->J(qs.points.row(i));
        sys.rhs.segment(k * bs, ns) += qs.weights[i] * J.x() * phi;
        sys.rhs.segment(k * bs + ns, ns) += qs.weights[i] * J.y() * phi;
      }
    }
  }

  // Edge terms: penalty and the two symmetric consistency terms.
  const int np = edge_points(p);
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const Edge& ed = mesh.edges[e];
    EdgeQuad q = edge_quadrature(mesh, e, np);
    const int nsides = ed.is_boundary ? 1 : 2;
    std::array<int, 2> cells{ed.left_cell, ed.right_cell};
    std::array<double, 2> jsign{1.0, -1.0};
    const double avg_w = ed.is_boundary ? 1.0 : 0.5;
    std::array<SideTrace, 2> st;
    for (int s = 0; s < nsides; ++s)
      st[s] = side_trace(mesh, *basis, mat, cells[s], q, ed.tangent);

    const double pen = config.eta_star * penalty_weight(mesh, mat, e, p);
    for (int sa = 0; sa < nsides; ++sa)
      for (int sb = 0; sb < nsides; ++sb) {
        // Entry (i in side sa, j in side sb): penalty [phi_j][phi_i] plus the
        // two consistency terms {ncurl phi_j}[phi_i] and [phi_j]{ncurl phi_i}.
        // With the left-minus-right jump and the ccw-tangent orientation used
        // here, cellwise integration by parts of the strong form produces the
        // consistency terms with a minus sign; that sign is required for
        // polynomial exactness and is used below.
        Eigen::MatrixXd JJ = Eigen::MatrixXd::Zero(bs, bs);
        Eigen::MatrixXd JC = Eigen::MatrixXd::Zero(bs, bs);
        Eigen::MatrixXd CJ = Eigen::MatrixXd::Zero(bs, bs);
        for (int i = 0; i < np; ++i) {
          double w = q.weights[i];
          JJ += (w * jsign[sa] * jsign[sb]) *
                st[sa].tang.row(i).transpose() * st[sb].tang.row(i);
          JC += (w * avg_w * jsign[sa]) *
                st[sa].tang.row(i).transpose() * st[sb].ncurl.row(i);
          CJ += (w * avg_w * jsign[sb]) *
                st[sa].ncurl.row(i).transpose() * st[sb].tang.row(i);
        }
        Eigen::MatrixXd local = pen * JJ - JC - CJ;
        for (int i = 0; i < bs; ++i)
          for (int j = 0; j < bs; ++j)
            if (local(i, j) != 0.0)
              trip.emplace_back(cells[sa] * bs + i, cells[sb] * bs + j,
                                local(i, j));
      }
  }

  sys.matrix.resize(n, n);
  sys.matrix.setFromTriplets(trip.begin(), trip.end());
  return sys;
}

}  // namespace

DGSystem assemble(const Mesh& mesh, const MaterialModel& mat, DGConfig config,
                  const SourceTerm& source) {
  return assemble_impl(mesh, mat, config, &source);
}

DGSystem assemble_matrix(const Mesh& mesh, const MaterialModel& mat,
                         DGConfig config) {
  return assemble_impl(mesh, mat, config, nullptr);
}

BrokenField solve(const DGSystem& sys) {
  const Mesh& mesh = *sys.mesh;
  const int p = sys.config.p;
  BrokenField x(mesh, p, 2);
  const int n = static_cast<int>(sys.rhs.size());
  double bnorm = sys.rhs.norm();
  if (bnorm == 0.0) return x;

  if (n < 2000) {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(sys.matrix);
    if (ldlt.info() != Eigen::Success)
      throw NoConvergence("direct factorization failed");
    x.coeffs() = ldlt.solve(sys.rhs);
    return x;
  }

  // Cell-block-Jacobi preconditioned CG.
  const int bs = x.block_size();
  const int nc = mesh.num_cells();
  std::vector<Eigen::LDLT<Eigen::MatrixXd>> blocks(nc);
  Eigen::MatrixXd dense_block(bs, bs);
  for (int k = 0; k < nc; ++k) {
    dense_block.setZero();
    for (int j = 0; j < bs; ++j)
      for (Eigen::SparseMatrix<double>::InnerIterator it(sys.matrix, k * bs + j);
           it; ++it) {
        int i = static_cast<int>(it.row()) - k * bs;
        if (i >= 0 && i < bs) dense_block(i, j) = it.value();
      }
    blocks[k].compute(dense_block);
  }
  auto precond = [&](const Eigen::VectorXd& r) {
    Eigen::VectorXd z(n);
    for (int k = 0; k < nc; ++k)
      z.segment(k * bs, bs) = blocks[k].solve(r.segment(k * bs, bs));
    return z;
  };

  Eigen::VectorXd xv = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd r = sys.rhs;
  Eigen::VectorXd z = precond(r);
  Eigen::VectorXd d = z;
  double rz = r.dot(z);
  for (int it = 0; it < sys.config.max_iterations; ++it) {
    if (r.norm() <= sys.config.tolerance * bnorm) {
      x.coeffs() = xv;
      return x;
    }
    Eigen::VectorXd Ad = sys.matrix * d;
    double alpha = rz / d.dot(Ad);
    xv += alpha * d;
    r -= alpha * Ad;
    z = precond(r);
    double rz_new = r.dot(z);
    d = z + (rz_new / rz) * d;
    rz = rz_new;
  }
  if (r.norm() <= sys.config.tolerance * bnorm) {
    x.coeffs() = xv;
    return x;
  }
  throw NoConvergence("CG iteration cap reached");
}

double stabilization(const BrokenField& v, const BrokenField& w,
                     const MaterialModel& mat, int p) {
  const Mesh& mesh = v.mesh();
  const int np = edge_points(std::max(v.degree(), w.degree()));
  double s = 0.0;
  for (int e = 0; e < mesh.num_edges(); ++e) {
    EdgeQuad q = edge_quadrature(mesh, e, np);
    Eigen::VectorXd jv = jump_c(v, e, np), jw = jump_c(w, e, np);
    s += penalty_weight(mesh, mat, e, p) * (jv.cwiseProduct(jw)).dot(q.weights);
  }
  return s;
}

double dg_norm(const BrokenField& v, const MaterialModel& mat, int p) {
  const Mesh& mesh = v.mesh();
  double total = 0.0;
  BrokenField cv = curl_h(v);
  for (int k = 0; k < mesh.num_cells(); ++k) {
    double l2 = v.block(k).squaredNorm();
    total += mat.omega * mat.omega * mat.eps[k] * l2;
    total += mat.nu[k] * cv.block(k).squaredNorm();
  }
  total += stabilization(v, v, mat, p);
  return std::sqrt(total);
}

double bilinear(const DGSystem& sys, const BrokenField& v, const BrokenField& w) {
  return v.coeffs().dot(sys.matrix * w.coeffs());
}

double coercivity_check(const Mesh& mesh, const MaterialModel& mat,
                        DGConfig config, int samples, unsigned seed) {
  DGSystem sys = assemble_matrix(mesh, mat, config);
  std::mt19937_64 rng(seed);
  double worst = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    BrokenField v = random_field(mesh, config.p, 2, rng);
    double denom = dg_norm(v, mat, config.p);
    worst = std::min(worst, bilinear(sys, v, v) / (denom * denom));
  }
  return worst;
}

ErrorMeasure error_measure(const ExactField& exact, const BrokenField& E_h,
                           const MaterialModel& mat, int p,
                           const std::vector<int>& subset) {
  const Mesh& mesh = E_h.mesh();
  std::vector<int> cells = subset;
  if (cells.empty()) {
    cells.resize(mesh.num_cells());
    for (int k = 0; k < mesh.num_cells(); ++k) cells[k] = k;
  }
  ErrorMeasure em;
  em.per_cell = Eigen::VectorXd::Zero(mesh.num_cells());
  const int np = edge_points(p);
  for (int k : cells) {
    double acc = 0.0;
    CellQuad q = cell_quadrature(mesh, k, 2 * p + 8);
    for (int i = 0; i < q.points.rows(); ++i) {
      Vec2 x = q.points.row(i);
      Vec2 ev = exact.value(x) - E_h.eval_vector(k, x);
      Eigen::Matrix2d J = E_h.eval_jacobian(k, x);
      double ec = exact.curl(x) - (J(1, 0) - J(0, 1));
      acc += q.weights[i] * (mat.omega * mat.omega * mat.eps[k] * ev.squaredNorm() +
                             mat.nu[k] * ec * ec);
    }
    // jump of the error equals minus the jump of E_h
    for (const auto& [e, sign] : mesh.cell_edges[k]) {
      EdgeQuad eq = edge_quadrature(mesh, e, np);
      Eigen::VectorXd j = jump_c(E_h, e, np);
      acc += mat.nu_sharp(mesh, e) * (double(p) * p / mesh.cell_diameter[k]) *
             j.cwiseAbs2().dot(eq.weights);
    }
    em.per_cell[k] = acc;
  }
  em.total = std::sqrt(em.per_cell.sum());
  return em;
}

namespace {
Vec2 split_value(const SplitField& f, int cell, const Vec2& x) {
  Vec2 v = Vec2::Zero();
  if (f.conforming) v += f.conforming->value(x);
  if (f.broken) v += f.broken->eval_vector(cell, x);
  return v;
}
double split_curl(const SplitField& f, int cell, const Vec2& x) {
  double c = 0.0;
  if (f.conforming) c += f.conforming->curl(x);
  if (f.broken) {
    Eigen::Matrix2d J = f.broken->eval_jacobian(cell, x);
    c += J(1, 0) - J(0, 1);
  }
  return c;
}
}  // namespace

double extended_bilinear(const Mesh& mesh, const MaterialModel& mat,
                         const DGConfig& config, const SplitField& v,
                         const SplitField& w) {
  const int p = config.p;
  const int quad = 2 * p + 8;
  double acc = 0.0;

  LiftingOperator L(mesh, p);
  std::optional<BrokenField> Lv, Lw;
  if (v.broken) Lv = L.lift(*v.broken);
  if (w.broken) Lw = L.lift(*w.broken);

  for (int k = 0; k < mesh.num_cells(); ++k) {
    CellQuad q = cell_quadrature(mesh, k, quad);
    for (int i = 0; i < q.points.rows(); ++i) {
      Vec2 x = q.points.row(i);
      Vec2 vv = split_value(v, k, x), wv = split_value(w, k, x);
      double cv = split_curl(v, k, x), cw = split_curl(w, k, x);
      double term = mat.omega * mat.omega * mat.eps[k] * vv.dot(wv) +
                    mat.nu[k] * cv * cw;
      if (Lw) term -= mat.nu[k] * Lw->eval_scalar(k, x) * cv;
      if (Lv) term -= mat.nu[k] * Lv->eval_scalar(k, x) * cw;
      acc += q.weights[i] * term;
    }
  }
  if (v.broken && w.broken)
    acc += config.eta_star * stabilization(*v.broken, *w.broken, mat, p);
  return acc;
}

double sharp_norm(const Mesh& mesh, const MaterialModel& mat, int p,
                  const SplitField& v) {
  double acc = 0.0;
  for (int k = 0; k < mesh.num_cells(); ++k) {
    CellQuad q = cell_quadrature(mesh, k, 2 * p + 8);
    for (int i = 0; i < q.points.rows(); ++i) {
      Vec2 x = q.points.row(i);
      Vec2 vv = split_value(v, k, x);
      double cv = split_curl(v, k, x);
      acc += q.weights[i] * (mat.omega * mat.omega * mat.eps[k] * vv.squaredNorm() +
                             mat.nu[k] * cv * cv);
    }
    if (v.broken) {
      const int np = edge_points(v.broken->degree());
      for (const auto& [e, sign] : mesh.cell_edges[k]) {
        EdgeQuad eq = edge_quadrature(mesh, e, np);
        Eigen::VectorXd j = jump_c(*v.broken, e, np);
        acc += mat.nu_sharp(mesh, e) * (double(p) * p / mesh.cell_diameter[k]) *
               j.cwiseAbs2().dot(eq.weights);
      }
    }
  }
  return std::sqrt(acc);
}

void write_system(std::ostream& os, const DGSystem& sys) {
  os << std::setprecision(17);
  for (int j = 0; j < sys.matrix.outerSize(); ++j)
    for (Eigen::SparseMatrix<double>::InnerIterator it(sys.matrix, j); it; ++it)
      os << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
}

}  // namespace curlrec
