// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace curlrec {

using Vec2 = Eigen::Vector2d;

struct MeshError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NonConforming : MeshError {
  using MeshError::MeshError;
};
struct InvertedCell : MeshError {
  using MeshError::MeshError;
};
struct DanglingVertex : MeshError {
  using MeshError::MeshError;
};

/// Oriented mesh edge. Endpoints are stored with v0 < v1. For interior edges
/// the normal points from left_cell into right_cell, where left_cell is the
/// incident cell with the smaller index; for boundary edges it points outward.
/// The tangent is the normal rotated by +90 degrees.
struct Edge {
  int v0 = -1, v1 = -1;
  Vec2 normal = Vec2::Zero();
  Vec2 tangent = Vec2::Zero();
  int left_cell = -1;
  int right_cell = -1;  // -1 on boundary edges
  double length = 0.0;
  bool is_boundary = false;
};

/// Immutable conforming 2D triangular mesh. All cells are counterclockwise.
class Mesh {
 public:
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> cells;
  std::vector<Edge> edges;
  /// Per cell: (edge index, incidence sign iota = n_K . n_F) for each of the
  /// three edges, ordered so that local edge f is opposite local vertex f.
  std::vector<std::array<std::pair<int, int>, 3>> cell_edges;
  /// Per vertex: sorted list of incident cell indices.
  std::vector<std::vector<int>> patch_index;
  /// Per vertex: true if the vertex lies on a boundary edge.
  std::vector<bool> vertex_on_boundary;
  /// Newest-vertex-bisection refinement edge of each cell (vertex pair).
  std::vector<std::array<int, 2>> ref_edge;

  std::vector<double> cell_diameter;  // h_K
  std::vector<double> cell_area;
  std::vector<double> cell_inradius;
  double h_max = 0.0;
  double kappa = 0.0;  // max_K h_K / inradius_K

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_cells() const { return static_cast<int>(cells.size()); }
  int num_edges() const { return static_cast<int>(edges.size()); }

  /// Barycentric coordinates of a point with respect to a cell.
  Eigen::Vector3d barycentric(int cell, const Vec2& x) const;
  /// Gradient of barycentric coordinate i of a cell (constant per cell).
  Vec2 barycentric_gradient(int cell, int i) const;
  /// Index of a cell containing x (brute force; -1 if none).
  int locate(const Vec2& x, double tol = 1e-12) const;

  std::uint64_t id() const { return id_; }

 private:
  std::uint64_t id_ = 0;
  friend Mesh build_mesh(const std::vector<Vec2>&,
                         const std::vector<std::array<int, 3>>&,
                         const std::vector<std::array<int, 2>>*);
};

/// Vertex patch omega_a: cells and edges sharing vertex a. Rim edges follow
/// the paper's convention: they are the boundary edges of the patch not
/// containing a, and the set is empty for boundary vertices.
struct VertexPatch {
  int vertex = -1;
  std::vector<int> cells;      // T_a, ascending
  std::vector<int> edges;      // F_a: edges containing a, ascending
  std::vector<int> rim_edges;  // F_a^\partial
  double diameter = 0.0;       // h_a

  /// Hat function psi_a evaluated on one of the patch cells.
  double hat(const Mesh& mesh, int cell, const Vec2& x) const;
  Vec2 hat_gradient(const Mesh& mesh, int cell) const;
};

/// Build a mesh from vertices and counterclockwise cells. Validates
/// conformity, orientation and connectivity; computes all adjacency.
/// If ref_edges is null, refinement edges are tagged on the longest edge.
Mesh build_mesh(const std::vector<Vec2>& points,
                const std::vector<std::array<int, 3>>& cells,
                const std::vector<std::array<int, 2>>* ref_edges = nullptr);

/// Structured mesh of the unit square with 2 n^2 cells.
Mesh uniform_square_mesh(int n);

/// L-shaped domain [-1,1]^2 minus [0,1]x[-1,0], 6 n^2 cells.
Mesh l_shape_mesh(int n);

/// Newest-vertex bisection with closure; every marked cell is bisected at
/// least once and the result is conforming.
Mesh refine(const Mesh& mesh, const std::vector<int>& marked);

VertexPatch vertex_patch(const Mesh& mesh, int a);

}  // namespace curlrec
