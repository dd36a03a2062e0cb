// SPDX-License-Identifier: Apache-2.0
#include "curlrec/estimator.hpp"

#include <iomanip>
#include <map>
#include <ostream>

namespace curlrec {

double cell_sharp_eps(const Mesh& mesh, const MaterialModel& mat, int cell) {
  double v = mat.eps[cell];
  for (const auto& [e, sign] : mesh.cell_edges[cell])
    v = std::max(v, mat.eps_sharp(mesh, e));
  return v;
}

double cell_sharp_nu(const Mesh& mesh, const MaterialModel& mat, int cell) {
  double v = mat.nu[cell];
  for (const auto& [e, sign] : mesh.cell_edges[cell])
    v = std::max(v, mat.nu_sharp(mesh, e));
  return v;
}

std::vector<int> face_neighborhood(const Mesh& mesh, int cell) {
  std::vector<int> out{cell};
  for (const auto& [e, sign] : mesh.cell_edges[cell]) {
    const Edge& ed = mesh.edges[e];
    int other = ed.left_cell == cell ? ed.right_cell : ed.left_cell;
    if (other >= 0) out.push_back(other);
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

/// Componentwise local L2 projection of a vector function on one cell.
struct LocalVec {
  const ModalBasis* basis = nullptr;
  int cell = -1;
  Eigen::VectorXd cx, cy;

  Vec2 eval(const Vec2& x) const {
    Eigen::VectorXd phi = basis->eval(cell, x);
    return {cx.dot(phi), cy.dot(phi)};
  }
  double eval_div(const Vec2& x) const {
    Eigen::VectorXd dx, dy;
    basis->eval_grad(cell, x, dx, dy);
    return cx.dot(dx) + cy.dot(dy);
  }
};

LocalVec project_local(const Mesh& mesh, const ModalBasis& basis, int cell,
                       const VectorFn& fn) {
  LocalVec lv;
  lv.basis = &basis;
  lv.cell = cell;
  lv.cx = Eigen::VectorXd::Zero(basis.modes());
  lv.cy = Eigen::VectorXd::Zero(basis.modes());
  CellQuad q = cell_quadrature(mesh, cell, 2 * basis.degree() + 8);
  for (int i = 0; i < q.points.rows(); ++i) {
    Eigen::VectorXd phi = basis.eval(cell, q.points.row(i));
    Vec2 v = fn(q.points.row(i));
    lv.cx += q.weights[i] * v.x() * phi;
    lv.cy += q.weights[i] * v.y() * phi;
  }
  return lv;
}

double edge_norm_sq(const EdgeQuad& q, const Eigen::VectorXd& samples) {
  return samples.cwiseAbs2().dot(q.weights);
}

/// Shared precomputation for the three indicator families on one field.
struct Context {
  const Mesh& mesh;
  const MaterialModel& mat;
  const SourceTerm& src;
  const BrokenField& E;
  int p;
  int np;
  BrokenField curl;    // curl_h E, degree p-1
  BrokenField nucurl;  // nu-scaled broken curl
  BrokenField epsE;    // eps-scaled field
  std::shared_ptr<const ModalBasis> div_basis;  // fallback for div J
  mutable std::map<int, LocalVec> jdiv_proj;

  Context(const BrokenField& E_h, const MaterialModel& m, const SourceTerm& s)
      : mesh(E_h.mesh()),
        mat(m),
        src(s),
        E(E_h),
        p(E_h.degree()),
        np(edge_points(E_h.degree())),
        curl(curl_h(E_h)),
        nucurl(curl),
        epsE(E_h) {
    for (int k = 0; k < mesh.num_cells(); ++k) {
      nucurl.block(k) *= mat.nu[k];
      epsE.block(k) *= mat.eps[k];
    }
    if (!src.div_J) div_basis = modal_basis(mesh, p + 3);
  }

  double div_J(int cell, const Vec2& x) const {
    if (src.div_J) return (*src.div_J)(x);
    auto it = jdiv_proj.find(cell);
    if (it == jdiv_proj.end())
      it = jdiv_proj.emplace(cell, project_local(mesh, *div_basis, cell, src.J))
               .first;
    return it->second.eval_div(x);
  }

  double indicator_div(int k) const {
    const double w2 = mat.omega * mat.omega;
    const double hp = mesh.cell_diameter[k] / p;
    double vol = 0.0;
    CellQuad q = cell_quadrature(mesh, k, 2 * p + 8);
    for (int i = 0; i < q.points.rows(); ++i) {
      Vec2 x = q.points.row(i);
      Eigen::Matrix2d J = E.eval_jacobian(k, x);
      double r = div_J(k, x) - w2 * mat.eps[k] * (J(0, 0) + J(1, 1));
      vol += q.weights[i] * r * r;
    }
    double acc = hp * hp / w2 * vol;
    for (const auto& [e, sign] : mesh.cell_edges[k]) {
      if (mesh.edges[e].is_boundary) continue;
      EdgeQuad eq = edge_quadrature(mesh, e, np);
      acc += w2 * hp * edge_norm_sq(eq, jump_d(epsE, e, np));
    }
    return std::sqrt(acc / cell_sharp_eps(mesh, mat, k));
  }

  double indicator_curl(int k) const {
    const double w2 = mat.omega * mat.omega;
    const double h = mesh.cell_diameter[k];
    const double hp = h / p;
    double vol = 0.0;
    CellQuad q = cell_quadrature(mesh, k, 2 * p + 8);
    for (int i = 0; i < q.points.rows(); ++i) {
      Vec2 x = q.points.row(i);
      Eigen::Vector2d grad = nucurl.eval_jacobian(k, x).row(0);
      Vec2 rot(grad.y(), -grad.x());
      Vec2 r = src.J(x) - w2 * mat.eps[k] * E.eval_vector(k, x) - rot;
      vol += q.weights[i] * r.squaredNorm();
    }
    double acc = hp * hp * vol;
    for (const auto& [e, sign] : mesh.cell_edges[k]) {
      EdgeQuad eq = edge_quadrature(mesh, e, np);
      if (!mesh.edges[e].is_boundary)
        acc += hp * edge_norm_sq(eq, jump_scalar(nucurl, e, np));
      acc += mat.nu_sharp(mesh, e) * (double(p) * p / h) *
             edge_norm_sq(eq, jump_c(E, e, np));
    }
    return std::sqrt(acc / cell_sharp_nu(mesh, mat, k));
  }

  double indicator_nc(int k) const {
    const double w2 = mat.omega * mat.omega;
    const double h = mesh.cell_diameter[k];
    double acc = 0.0;
    for (const auto& [e, sign] : mesh.cell_edges[k]) {
      EdgeQuad eq = edge_quadrature(mesh, e, np);
      if (!mesh.edges[e].is_boundary)
        acc += mat.nu_sharp(mesh, e) * (h / p) *
               edge_norm_sq(eq, jump_scalar(curl, e, np));
      acc += (w2 * mat.eps_sharp(mesh, e) * h +
              mat.nu_sharp(mesh, e) * double(p) * p / h) *
             edge_norm_sq(eq, jump_c(E, e, np));
    }
    return std::sqrt(acc);
  }
};

double oscillation_cellwise(const Mesh& mesh, const MaterialModel& mat,
                            const SourceTerm& source, int p, int cell,
                            const ModalBasis& pb, const ModalBasis& hb) {
  const double w2 = mat.omega * mat.omega;
  double acc = 0.0;
  const double hp = mesh.cell_diameter[cell] / p;
  LocalVec proj = project_local(mesh, pb, cell, source.J);
  std::optional<LocalVec> hi;
  if (!source.div_J) hi = project_local(mesh, hb, cell, source.J);
  double l2 = 0.0, dv = 0.0;
  CellQuad q = cell_quadrature(mesh, cell, 2 * (p + 3) + 8);
  for (int i = 0; i < q.points.rows(); ++i) {
    Vec2 x = q.points.row(i);
    l2 += q.weights[i] * (source.J(x) - proj.eval(x)).squaredNorm();
    double dj = source.div_J ? (*source.div_J)(x) : hi->eval_div(x);
    double r = dj - proj.eval_div(x);
    dv += q.weights[i] * r * r;
  }
  acc += hp * hp / cell_sharp_nu(mesh, mat, cell) * l2;
  acc += hp * hp / (w2 * cell_sharp_eps(mesh, mat, cell)) * dv;
  return acc;
}

}  // namespace

double eta_div(const BrokenField& E_h, const MaterialModel& mat,
               const SourceTerm& source, int cell) {
  return Context(E_h, mat, source).indicator_div(cell);
}

double eta_curl(const BrokenField& E_h, const MaterialModel& mat,
                const SourceTerm& source, int cell) {
  return Context(E_h, mat, source).indicator_curl(cell);
}

double eta_nc(const BrokenField& E_h, const MaterialModel& mat, int cell) {
  SourceTerm dummy{[](const Vec2&) { return Vec2::Zero(); },
                   ScalarFn([](const Vec2&) { return 0.0; })};
  return Context(E_h, mat, dummy).indicator_nc(cell);
}

double oscillation(const Mesh& mesh, const MaterialModel& mat,
                   const SourceTerm& source, int p, int cell) {
  auto pb = modal_basis(mesh, p);
  auto hb = modal_basis(mesh, p + 3);
  double acc = 0.0;
  for (int k : face_neighborhood(mesh, cell))
    acc += oscillation_cellwise(mesh, mat, source, p, k, *pb, *hb);
  return std::sqrt(acc);
}

IndicatorReport compute_indicators(const BrokenField& E_h,
                                   const MaterialModel& mat,
                                   const SourceTerm& source,
                                   const ExactField* exact) {
  const Mesh& mesh = E_h.mesh();
  const int nc = mesh.num_cells();
  Context ctx(E_h, mat, source);

  IndicatorReport rep;
  rep.p = ctx.p;
  rep.eta_div.resize(nc);
  rep.eta_curl.resize(nc);
  rep.eta_nc.resize(nc);
  rep.eta_total.resize(nc);
  rep.oscillation.resize(nc);

  auto pb = modal_basis(mesh, ctx.p);
  auto hb = modal_basis(mesh, ctx.p + 3);
  Eigen::VectorXd osc_cell(nc);
  for (int k = 0; k < nc; ++k)
    osc_cell[k] = oscillation_cellwise(mesh, mat, source, ctx.p, k, *pb, *hb);

  for (int k = 0; k < nc; ++k) {
    rep.eta_div[k] = ctx.indicator_div(k);
    rep.eta_curl[k] = ctx.indicator_curl(k);
    rep.eta_nc[k] = ctx.indicator_nc(k);
    rep.eta_total[k] = std::sqrt(rep.eta_div[k] * rep.eta_div[k] +
                                 rep.eta_curl[k] * rep.eta_curl[k] +
                                 rep.eta_nc[k] * rep.eta_nc[k]);
    double nb = 0.0;
    for (int kk : face_neighborhood(mesh, k)) nb += osc_cell[kk];
    rep.oscillation[k] = std::sqrt(nb);
  }
  rep.total_div = rep.eta_div.norm();
  rep.total_curl = rep.eta_curl.norm();
  rep.total_nc = rep.eta_nc.norm();
  rep.total = rep.eta_total.norm();

  if (exact) {
    ErrorMeasure em = error_measure(*exact, E_h, mat, ctx.p);
    rep.has_error = true;
    rep.err_sharp_sq = em.per_cell;
    rep.err_total = em.total;
    if (em.total < 1e-10)
      rep.exact_flag = true;
    else
      rep.effectivity = rep.total / em.total;
  }
  return rep;
}

Eigen::VectorXd local_efficiency_ratios(const Mesh& mesh,
                                        const IndicatorReport& report) {
  if (!report.has_error)
    throw std::invalid_argument("efficiency ratios require an exact solution");
  const int nc = mesh.num_cells();
  Eigen::VectorXd out(nc);
  for (int k = 0; k < nc; ++k) {
    double err = 0.0;
    for (int kk : face_neighborhood(mesh, k)) err += report.err_sharp_sq[kk];
    double denom = std::sqrt(err) + report.oscillation[k];
    out[k] = denom < 1e-14 ? 0.0 : report.eta_total[k] / denom;
  }
  return out;
}

void write_indicator_csv(std::ostream& os, const IndicatorReport& report) {
  os << std::setprecision(17);
  os << "cell,eta_div,eta_curl,eta_nc,eta";
  if (report.has_error) os << ",err_sharp";
  os << '\n';
  for (int k = 0; k < report.eta_total.size(); ++k) {
    os << k << ',' << report.eta_div[k] << ',' << report.eta_curl[k] << ','
       << report.eta_nc[k] << ',' << report.eta_total[k];
    if (report.has_error) os << ',' << std::sqrt(report.err_sharp_sq[k]);
    os << '\n';
  }
  os << "# totals eta=" << report.total << " eta_div=" << report.total_div
     << " eta_curl=" << report.total_curl << " eta_nc=" << report.total_nc;
  if (report.has_error) {
    os << " err_sharp=" << report.err_total << " effectivity=";
    if (report.exact_flag)
      os << "exact";
    else
      os << report.effectivity;
  }
  os << '\n';
}

}  // namespace curlrec
