// Copyright (c) 2026 The formgrad authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <map>
#include <memory>
#include <vector>

#include "formgrad/errors.hpp"
#include "formgrad/types.hpp"

namespace formgrad {

class Function;
class FunctionSpace;

/// Reference triangle with vertices (0,0), (1,0), (0,1). Edge m is the edge
/// opposite vertex m; edges are parametrized over t in [0,1] in the order of
/// their (local) endpoint indices below.
struct ReferenceTriangle {
  static constexpr std::array<Vec2, 3> vertices{{{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}};
  // edge 0: v1->v2 (hypotenuse), edge 1: v0->v2 (x=0), edge 2: v0->v1 (y=0)
  static constexpr std::array<std::array<int, 2>, 3> edge_vertices{
      {{1, 2}, {0, 2}, {0, 1}}};

  /// Outward unit normals of the three edges.
  static const std::array<Vec2, 3>& edge_normals();

  /// Reference lengths of the three edges (sqrt(2), 1, 1).
  static const std::array<double, 3>& edge_lengths();

  /// Point on edge `edge` at parameter t in [0,1].
  static Vec2 edge_point(int edge, double t);
};

/// An exterior (boundary) facet: an edge owned by exactly one cell.
struct Facet {
  int v0 = -1;        // endpoints, in local edge order of the owning cell
  int v1 = -1;
  int marker = 0;
  int cell = -1;      // owning cell
  int local_edge = -1;
};

/// 2D simplicial mesh. The geometry is carried by a vector-valued P1
/// coordinate function whose dof array is the vertex coordinate storage:
/// moving the coordinate function moves the mesh and vice versa.
///
/// Connectivity (cells, edges, facets) is immutable after creation; only
/// coordinates change, through move_mesh or through the coordinate
/// function's dofs. Mutation requires exclusive access; concurrent reads
/// are safe.
class Mesh {
 public:
  /// `facet_markers` lists boundary edges as {v0, v1, marker}; order of v0/v1
  /// does not matter. Boundary edges not listed get marker 0. A listed edge
  /// that is not on the boundary is an error.
  static std::shared_ptr<Mesh> create(
      const std::vector<Vec2>& vertices,
      std::vector<std::array<int, 3>> cells,
      const std::vector<std::array<int, 3>>& facet_markers = {});

  int num_vertices() const { return static_cast<int>(coords_->size() / 2); }
  int num_cells() const { return static_cast<int>(cells_.size()); }

  const std::vector<std::array<int, 3>>& cells() const { return cells_; }
  const std::array<int, 3>& cell(int c) const {
    return cells_[static_cast<std::size_t>(c)];
  }

  Vec2 vertex(int i) const {
    return {(*coords_)[2 * static_cast<std::size_t>(i)],
            (*coords_)[2 * static_cast<std::size_t>(i) + 1]};
  }

  const std::vector<Facet>& exterior_facets() const { return facets_; }

  /// Unique mesh edges as sorted vertex pairs, in lexicographic order.
  const std::vector<std::array<int, 2>>& edges() const { return edges_; }

  /// Edge ids of a cell in local edge order (edge m opposite vertex m).
  const std::array<int, 3>& cell_edges(int cell) const {
    return cell_edges_[static_cast<std::size_t>(cell)];
  }

  /// Distinct boundary markers, sorted.
  std::vector<int> boundary_markers() const;
  bool has_boundary_marker(int marker) const;

  /// The vector P1 space the coordinate function lives on.
  std::shared_ptr<const FunctionSpace> coordinate_space() const;

  const Function& coordinate_function() const;
  Function& coordinate_function();

  /// Raw coordinate storage (interleaved x0,y0,x1,y1,...), shared with the
  /// coordinate function.
  const std::vector<double>& coordinates() const { return *coords_; }

  struct Checkpoint {
    std::vector<double> coords, base, displacement;
  };
  Checkpoint save_coordinates() const;
  void restore_coordinates(const Checkpoint& cp);

 private:
  friend void move_mesh(Mesh&, const Function&, double);

  Mesh() = default;

  std::vector<std::array<int, 3>> cells_;
  std::vector<Facet> facets_;
  std::vector<std::array<int, 2>> edges_;
  std::vector<std::array<int, 3>> cell_edges_;
  std::shared_ptr<std::vector<double>> coords_;
  // Coordinates are maintained as base + accumulated displacement so that a
  // move followed by the opposite move restores them bit-for-bit.
  std::vector<double> base_coords_;
  std::vector<double> displacement_;
  std::shared_ptr<const FunctionSpace> coord_space_;
  std::shared_ptr<Function> coord_function_;
};

struct CellJacobian {
  Mat22 J;     // DF = sum_m X_m (x) ref_grad(b_m)
  double det;  // det(DF)
};

/// Jacobian of the cell map. Throws InvertedCellError when det <= 1e-14.
CellJacobian cell_map_jacobian(const Mesh& mesh, int cell);

/// In-place coordinate update X <- X + scale * V. The displacement must live
/// on this mesh's coordinate space. Does not check validity; see
/// validate_mesh.
void move_mesh(Mesh& mesh, const Function& displacement, double scale);

/// Minimum cell-map determinant over all cells. Never throws; callers decide
/// what to do with non-positive values.
double validate_mesh(const Mesh& mesh);

/// Structured meshes used by tests, examples and fixtures.
/// unit_square_mesh: [0,1]^2, n x n squares split into 2n^2 triangles;
/// boundary markers 1 = left, 2 = right, 3 = bottom, 4 = top.
std::shared_ptr<Mesh> unit_square_mesh(int n);

/// Quarter annulus, radii [1,2], angle [0, pi/2]; markers 1 = inner arc,
/// 2 = outer arc, 3 = theta=0 edge, 4 = theta=pi/2 edge.
std::shared_ptr<Mesh> annulus_sector_mesh(int nr, int nt);

/// Straight channel [0,3] x [0,1]; markers 1 = left, 2 = right, 3 = bottom,
/// 4 = top.
std::shared_ptr<Mesh> channel_mesh(int nx, int ny);

}  // namespace formgrad
