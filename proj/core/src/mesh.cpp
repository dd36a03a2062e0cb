// SPDX-License-Identifier: Apache-2.0
#include "curlrec/mesh.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <set>
#include <string>

namespace curlrec {

namespace {
std::uint64_t next_mesh_id() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1);
}

double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) -
                (b.y() - a.y()) * (c.x() - a.x()));
}
}  // namespace

Eigen::Vector3d Mesh::barycentric(int cell, const Vec2& x) const {
  const auto& c = cells[cell];
  const Vec2 &a = vertices[c[0]], &b = vertices[c[1]], &d = vertices[c[2]];
  double area = signed_area(a, b, d);
  Eigen::Vector3d lam;
  lam[0] = signed_area(x, b, d) / area;
  lam[1] = signed_area(a, x, d) / area;
  lam[2] = signed_area(a, b, x) / area;
  return lam;
}

Vec2 Mesh::barycentric_gradient(int cell, int i) const {
  const auto& c = cells[cell];
  // lambda_i is affine, 1 at vertex i, 0 on the opposite edge.
  const Vec2& opp0 = vertices[c[(i + 1) % 3]];
  const Vec2& opp1 = vertices[c[(i + 2) % 3]];
  Vec2 e = opp1 - opp0;
  Vec2 n(e.y(), -e.x());  // normal to the opposite edge
  double d = n.dot(vertices[c[i]] - opp0);
  return n / d;
}

int Mesh::locate(const Vec2& x, double tol) const {
  for (int k = 0; k < num_cells(); ++k) {
    Eigen::Vector3d lam = barycentric(k, x);
    if (lam.minCoeff() >= -tol) return k;
  }
  return -1;
}

double VertexPatch::hat(const Mesh& mesh, int cell, const Vec2& x) const {
  const auto& c = mesh.cells[cell];
  for (int i = 0; i < 3; ++i)
    if (c[i] == vertex) return mesh.barycentric(cell, x)[i];
  return 0.0;
}

Vec2 VertexPatch::hat_gradient(const Mesh& mesh, int cell) const {
  const auto& c = mesh.cells[cell];
  for (int i = 0; i < 3; ++i)
    if (c[i] == vertex) return mesh.barycentric_gradient(cell, i);
  return Vec2::Zero();
}

Mesh build_mesh(const std::vector<Vec2>& points,
                const std::vector<std::array<int, 3>>& cells,
                const std::vector<std::array<int, 2>>* ref_edges) {
  Mesh m;
  m.id_ = next_mesh_id();
  m.vertices = points;
  m.cells = cells;
  const int nv = m.num_vertices();
  const int nc = m.num_cells();

  std::set<std::array<int, 3>> seen;
  for (int k = 0; k < nc; ++k) {
    auto c = m.cells[k];
    for (int i = 0; i < 3; ++i)
      if (c[i] < 0 || c[i] >= nv)
        throw MeshError("cell " + std::to_string(k) + ": vertex index out of range");
    std::array<int, 3> key = c;
    std::sort(key.begin(), key.end());
    if (key[0] == key[1] || key[1] == key[2])
      throw MeshError("cell " + std::to_string(k) + ": repeated vertex");
    if (!seen.insert(key).second)
      throw MeshError("duplicate cell " + std::to_string(k));
    double area = signed_area(points[c[0]], points[c[1]], points[c[2]]);
    if (area <= 0.0)
      throw InvertedCell("cell " + std::to_string(k) + " has nonpositive signed area");
  }

  // Deterministic edge numbering: sorted endpoint pairs.
  std::map<std::array<int, 2>, int> edge_id;
  for (const auto& c : m.cells)
    for (int f = 0; f < 3; ++f) {
      int a = c[(f + 1) % 3], b = c[(f + 2) % 3];
      edge_id.insert({{std::min(a, b), std::max(a, b)}, 0});
    }
  {
    int next = 0;
    for (auto& [key, idx] : edge_id) idx = next++;
  }
  m.edges.resize(edge_id.size());
  for (const auto& [key, idx] : edge_id) {
    Edge& e = m.edges[idx];
    e.v0 = key[0];
    e.v1 = key[1];
    e.length = (points[key[1]] - points[key[0]]).norm();
  }

  // Cell incidence; left = smaller incident cell index.
  m.cell_edges.resize(nc);
  for (int k = 0; k < nc; ++k) {
    const auto& c = m.cells[k];
    for (int f = 0; f < 3; ++f) {
      int a = c[(f + 1) % 3], b = c[(f + 2) % 3];
      int idx = edge_id.at({std::min(a, b), std::max(a, b)});
      Edge& e = m.edges[idx];
      if (e.left_cell < 0)
        e.left_cell = k;
      else if (e.right_cell < 0)
        e.right_cell = k;
      else
        throw NonConforming("edge shared by more than two cells");
      m.cell_edges[k][f] = {idx, 0};
    }
  }

  // Orientation: n_F is the outward normal of the left cell.
  for (auto& e : m.edges) {
    if (e.left_cell < 0) throw MeshError("edge without incident cell");
    e.is_boundary = (e.right_cell < 0);
    const auto& c = m.cells[e.left_cell];
    int other = -1;
    for (int i = 0; i < 3; ++i)
      if (c[i] != e.v0 && c[i] != e.v1) other = c[i];
    Vec2 d = points[e.v1] - points[e.v0];
    Vec2 n(d.y(), -d.x());
    if (n.dot(points[other] - points[e.v0]) > 0) n = -n;  // outward from left
    e.normal = n.normalized();
    e.tangent = Vec2(-e.normal.y(), e.normal.x());
  }
  for (int k = 0; k < nc; ++k)
    for (int f = 0; f < 3; ++f) {
      auto& [idx, sign] = m.cell_edges[k][f];
      sign = (m.edges[idx].left_cell == k) ? +1 : -1;
    }

  // Conformity: a hanging vertex lies strictly inside another cell's edge.
  for (const auto& e : m.edges) {
    if (!e.is_boundary) continue;
    const Vec2 &a = points[e.v0], &b = points[e.v1];
    for (int v = 0; v < nv; ++v) {
      if (v == e.v0 || v == e.v1) continue;
      Vec2 ap = points[v] - a, ab = b - a;
      double cross = ap.x() * ab.y() - ap.y() * ab.x();
      double t = ap.dot(ab) / ab.squaredNorm();
      if (std::abs(cross) < 1e-12 * ab.norm() && t > 1e-10 && t < 1.0 - 1e-10)
        throw NonConforming("hanging vertex " + std::to_string(v));
    }
  }

  m.patch_index.assign(nv, {});
  for (int k = 0; k < nc; ++k)
    for (int v : m.cells[k]) m.patch_index[v].push_back(k);
  for (auto& lst : m.patch_index) std::sort(lst.begin(), lst.end());
  for (int v = 0; v < nv; ++v)
    if (m.patch_index[v].empty())
      throw DanglingVertex("vertex " + std::to_string(v) + " unused");

  m.vertex_on_boundary.assign(nv, false);
  for (const auto& e : m.edges)
    if (e.is_boundary) {
      m.vertex_on_boundary[e.v0] = true;
      m.vertex_on_boundary[e.v1] = true;
    }

  m.cell_diameter.resize(nc);
  m.cell_area.resize(nc);
  m.cell_inradius.resize(nc);
  m.h_max = 0.0;
  m.kappa = 0.0;
  for (int k = 0; k < nc; ++k) {
    const auto& c = m.cells[k];
    double l0 = (points[c[1]] - points[c[2]]).norm();
    double l1 = (points[c[2]] - points[c[0]]).norm();
    double l2 = (points[c[0]] - points[c[1]]).norm();
    double area = signed_area(points[c[0]], points[c[1]], points[c[2]]);
    m.cell_area[k] = area;
    m.cell_diameter[k] = std::max({l0, l1, l2});
    m.cell_inradius[k] = 2.0 * area / (l0 + l1 + l2);
    m.h_max = std::max(m.h_max, m.cell_diameter[k]);
    m.kappa = std::max(m.kappa, m.cell_diameter[k] / m.cell_inradius[k]);
  }

  if (ref_edges) {
    m.ref_edge = *ref_edges;
  } else {
    // Longest-edge tagging; ties broken by smaller endpoint pair.
    m.ref_edge.resize(nc);
    for (int k = 0; k < nc; ++k) {
      const auto& c = m.cells[k];
      int best = -1;
      double best_len = -1.0;
      std::array<int, 2> best_key{};
      for (int f = 0; f < 3; ++f) {
        int a = c[(f + 1) % 3], b = c[(f + 2) % 3];
        std::array<int, 2> key{std::min(a, b), std::max(a, b)};
        double len = (points[a] - points[b]).norm();
        if (len > best_len + 1e-14 ||
            (std::abs(len - best_len) <= 1e-14 && key < best_key)) {
          best = f;
          best_len = len;
          best_key = key;
        }
      }
      (void)best;
      m.ref_edge[k] = best_key;
    }
  }
  return m;
}

Mesh uniform_square_mesh(int n) {
  if (n < 1) throw MeshError("uniform_square_mesh: n < 1");
  std::vector<Vec2> pts;
  pts.reserve((n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      pts.emplace_back(double(i) / n, double(j) / n);
  auto id = [n](int i, int j) { return j * (n + 1) + i; };
  std::vector<std::array<int, 3>> cells;
  cells.reserve(2 * n * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      cells.push_back({a, b, c});
      cells.push_back({a, c, d});
    }
  return build_mesh(pts, cells);
}

Mesh l_shape_mesh(int n) {
  if (n < 1) throw MeshError("l_shape_mesh: n < 1");
  // Grid over [-1,1]^2 minus the lower-right quadrant [0,1]x[-1,0].
  std::map<std::array<int, 2>, int> vid;
  std::vector<Vec2> pts;
  auto get = [&](int i, int j) {
    auto it = vid.find({i, j});
    if (it != vid.end()) return it->second;
    int idx = static_cast<int>(pts.size());
    pts.emplace_back(double(i) / n - 1.0, double(j) / n - 1.0);
    vid[{i, j}] = idx;
    return idx;
  };
  std::vector<std::array<int, 3>> cells;
  for (int j = 0; j < 2 * n; ++j)
    for (int i = 0; i < 2 * n; ++i) {
      bool in_cut = (i >= n) && (j < n);
      if (in_cut) continue;
      int a = get(i, j), b = get(i + 1, j), c = get(i + 1, j + 1), d = get(i, j + 1);
      cells.push_back({a, b, c});
      cells.push_back({a, c, d});
    }
  return build_mesh(pts, cells);
}

namespace {
struct ProtoCell {
  std::array<int, 3> v;         // ccw
  std::array<int, 2> ref_edge;  // vertex pair (sorted)
};
}  // namespace

Mesh refine(const Mesh& mesh, const std::vector<int>& marked) {
  for (int k : marked)
    if (k < 0 || k >= mesh.num_cells()) throw MeshError("refine: bad cell index");
  if (marked.empty()) {
    return build_mesh(mesh.vertices, mesh.cells, &mesh.ref_edge);
  }

  auto key_of = [](int a, int b) {
    return std::array<int, 2>{std::min(a, b), std::max(a, b)};
  };

  std::set<std::array<int, 2>> split;
  for (int k : marked) split.insert(key_of(mesh.ref_edge[k][0], mesh.ref_edge[k][1]));

  // Closure: any cell touching a split edge must split its refinement edge.
  bool changed = true;
  while (changed) {
    changed = false;
    for (int k = 0; k < mesh.num_cells(); ++k) {
      const auto& c = mesh.cells[k];
      bool touches = false;
      for (int f = 0; f < 3; ++f)
        if (split.count(key_of(c[(f + 1) % 3], c[(f + 2) % 3]))) touches = true;
      if (touches && !split.count(key_of(mesh.ref_edge[k][0], mesh.ref_edge[k][1]))) {
        split.insert(key_of(mesh.ref_edge[k][0], mesh.ref_edge[k][1]));
        changed = true;
      }
    }
  }

  std::vector<Vec2> pts = mesh.vertices;
  std::map<std::array<int, 2>, int> midpoint;
  auto mid = [&](std::array<int, 2> key) {
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    int idx = static_cast<int>(pts.size());
    pts.push_back(0.5 * (mesh.vertices[key[0]] + pts[key[1]]));
    midpoint[key] = idx;
    return idx;
  };

  std::vector<ProtoCell> out;
  // Recursive bisection of one cell against the split set.
  auto bisect = [&](auto&& self, const ProtoCell& c) -> void {
    if (!split.count(c.ref_edge)) {
      out.push_back(c);
      return;
    }
    // Rotate so the refinement edge is (v0, v1), apex v2.
    std::array<int, 3> v = c.v;
    for (int r = 0; r < 3; ++r) {
      if (key_of(v[0], v[1]) == c.ref_edge) break;
      v = {v[1], v[2], v[0]};
    }
    int mvtx = mid(key_of(v[0], v[1]));
    // Children keep the parent edge they contain as refinement edge.
    self(self, ProtoCell{{v[0], mvtx, v[2]}, key_of(v[2], v[0])});
    self(self, ProtoCell{{mvtx, v[1], v[2]}, key_of(v[1], v[2])});
  };
  for (int k = 0; k < mesh.num_cells(); ++k)
    bisect(bisect, ProtoCell{mesh.cells[k], key_of(mesh.ref_edge[k][0], mesh.ref_edge[k][1])});

  std::vector<std::array<int, 3>> cells;
  std::vector<std::array<int, 2>> tags;
  cells.reserve(out.size());
  tags.reserve(out.size());
  for (const auto& c : out) {
    cells.push_back(c.v);
    tags.push_back(c.ref_edge);
  }
  return build_mesh(pts, cells, &tags);
}

VertexPatch vertex_patch(const Mesh& mesh, int a) {
  if (a < 0 || a >= mesh.num_vertices()) throw MeshError("vertex_patch: bad vertex");
  VertexPatch p;
  p.vertex = a;
  p.cells = mesh.patch_index[a];
  std::set<int> edge_set, rim_set;
  for (int k : p.cells) {
    const auto& c = mesh.cells[k];
    for (int f = 0; f < 3; ++f) {
      int e = mesh.cell_edges[k][f].first;
      const Edge& ed = mesh.edges[e];
      if (ed.v0 == a || ed.v1 == a)
        edge_set.insert(e);
      else
        rim_set.insert(e);
    }
  }
  p.edges.assign(edge_set.begin(), edge_set.end());
  if (!mesh.vertex_on_boundary[a])
    p.rim_edges.assign(rim_set.begin(), rim_set.end());
  std::set<int> verts;
  for (int k : p.cells)
    for (int v : mesh.cells[k]) verts.insert(v);
  p.diameter = 0.0;
  for (int u : verts)
    for (int v : verts)
      p.diameter = std::max(p.diameter, (mesh.vertices[u] - mesh.vertices[v]).norm());
  return p;
}

}  // namespace curlrec
