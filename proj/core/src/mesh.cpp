// Copyright (c) 2026 The formgrad authors
// SPDX-License-Identifier: Apache-2.0

#include "formgrad/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "formgrad/space.hpp"

namespace formgrad {

const std::array<Vec2, 3>& ReferenceTriangle::edge_normals() {
  static const double s = 1.0 / std::sqrt(2.0);
  static const std::array<Vec2, 3> normals{{{s, s}, {-1.0, 0.0}, {0.0, -1.0}}};
  return normals;
}

const std::array<double, 3>& ReferenceTriangle::edge_lengths() {
  static const std::array<double, 3> lengths{std::sqrt(2.0), 1.0, 1.0};
  return lengths;
}

Vec2 ReferenceTriangle::edge_point(int edge, double t) {
  const auto& ev = edge_vertices[static_cast<std::size_t>(edge)];
  const Vec2 a = vertices[static_cast<std::size_t>(ev[0])];
  const Vec2 b = vertices[static_cast<std::size_t>(ev[1])];
  return {a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])};
}

namespace {
std::array<int, 2> sorted_pair(int a, int b) {
  return a < b ? std::array<int, 2>{a, b} : std::array<int, 2>{b, a};
}
}  // namespace

std::shared_ptr<Mesh> Mesh::create(
    const std::vector<Vec2>& vertices, std::vector<std::array<int, 3>> cells,
    const std::vector<std::array<int, 3>>& facet_markers) {
  auto mesh = std::shared_ptr<Mesh>(new Mesh());
  mesh->cells_ = std::move(cells);

  mesh->coords_ = std::make_shared<std::vector<double>>();
  mesh->coords_->reserve(vertices.size() * 2);
  for (const auto& v : vertices) {
    mesh->coords_->push_back(v[0]);
    mesh->coords_->push_back(v[1]);
  }
  mesh->base_coords_ = *mesh->coords_;
  mesh->displacement_.assign(mesh->coords_->size(), 0.0);

  for (const auto& c : mesh->cells_)
    for (int v : c)
      if (v < 0 || v >= mesh->num_vertices())
        throw Error("Mesh: cell vertex index out of range");

  // Unique edges in lexicographic order of sorted vertex pairs.
  std::set<std::array<int, 2>> edge_set;
  for (const auto& c : mesh->cells_) {
    edge_set.insert(sorted_pair(c[1], c[2]));
    edge_set.insert(sorted_pair(c[0], c[2]));
    edge_set.insert(sorted_pair(c[0], c[1]));
  }
  mesh->edges_.assign(edge_set.begin(), edge_set.end());

  std::map<std::array<int, 2>, int> edge_index;
  for (int i = 0; i < static_cast<int>(mesh->edges_.size()); ++i)
    edge_index[mesh->edges_[static_cast<std::size_t>(i)]] = i;

  mesh->cell_edges_.resize(mesh->cells_.size());
  std::map<std::array<int, 2>, std::pair<int, int>> owner;  // edge -> (cell, local), last wins
  std::map<std::array<int, 2>, int> edge_count;
  for (int c = 0; c < mesh->num_cells(); ++c) {
    const auto& cell = mesh->cells_[static_cast<std::size_t>(c)];
    for (int le = 0; le < 3; ++le) {
      const auto& lv = ReferenceTriangle::edge_vertices[static_cast<std::size_t>(le)];
      const auto key = sorted_pair(cell[static_cast<std::size_t>(lv[0])],
                                   cell[static_cast<std::size_t>(lv[1])]);
      mesh->cell_edges_[static_cast<std::size_t>(c)][static_cast<std::size_t>(le)] =
          edge_index.at(key);
      edge_count[key] += 1;
      if (edge_count[key] == 1) owner[key] = {c, le};
    }
  }

  // Exterior facets: edges adjacent to exactly one cell, in edge order.
  std::map<std::array<int, 2>, int> marker_of;
  for (const auto& fm : facet_markers) {
    const auto key = sorted_pair(fm[0], fm[1]);
    if (edge_count.find(key) == edge_count.end())
      throw Error("Mesh: marked facet (" + std::to_string(fm[0]) + "," +
                  std::to_string(fm[1]) + ") is not a mesh edge");
    if (edge_count.at(key) != 1)
      throw Error("Mesh: marked facet (" + std::to_string(fm[0]) + "," +
                  std::to_string(fm[1]) + ") is not on the boundary");
    marker_of[key] = fm[2];
  }

  for (const auto& e : mesh->edges_) {
    if (edge_count.at(e) != 1) continue;
    const auto [cell, local] = owner.at(e);
    const auto& lv = ReferenceTriangle::edge_vertices[static_cast<std::size_t>(local)];
    const auto& cv = mesh->cells_[static_cast<std::size_t>(cell)];
    Facet f;
    f.v0 = cv[static_cast<std::size_t>(lv[0])];
    f.v1 = cv[static_cast<std::size_t>(lv[1])];
    f.cell = cell;
    f.local_edge = local;
    const auto it = marker_of.find(e);
    f.marker = it == marker_of.end() ? 0 : it->second;
    mesh->facets_.push_back(f);
  }

  // The internal coordinate space is a non-owning view; owning it here
  // would cycle mesh -> space -> mesh and leak both.
  mesh->coord_space_ = FunctionSpace::create_view(*mesh, 1, 2);
  mesh->coord_function_ =
      std::make_shared<Function>(mesh->coord_space_, mesh->coords_, "X");
  return mesh;
}

std::vector<int> Mesh::boundary_markers() const {
  std::set<int> markers;
  for (const auto& f : facets_) markers.insert(f.marker);
  return {markers.begin(), markers.end()};
}

bool Mesh::has_boundary_marker(int marker) const {
  for (const auto& f : facets_)
    if (f.marker == marker) return true;
  return false;
}

std::shared_ptr<const FunctionSpace> Mesh::coordinate_space() const {
  return coord_space_;
}

const Function& Mesh::coordinate_function() const { return *coord_function_; }
Function& Mesh::coordinate_function() { return *coord_function_; }

Mesh::Checkpoint Mesh::save_coordinates() const {
  return {*coords_, base_coords_, displacement_};
}

void Mesh::restore_coordinates(const Checkpoint& cp) {
  *coords_ = cp.coords;
  base_coords_ = cp.base;
  displacement_ = cp.displacement;
}

CellJacobian cell_map_jacobian(const Mesh& mesh, int cell) {
  const auto& c = mesh.cell(cell);
  const Vec2 x0 = mesh.vertex(c[0]);
  const Vec2 x1 = mesh.vertex(c[1]);
  const Vec2 x2 = mesh.vertex(c[2]);
  // P1 gradients are (-1,-1), (1,0), (0,1): DF columns are edge vectors.
  CellJacobian out;
  out.J = {x1[0] - x0[0], x2[0] - x0[0], x1[1] - x0[1], x2[1] - x0[1]};
  out.det = out.J[0] * out.J[3] - out.J[1] * out.J[2];
  if (out.det <= 1e-14)
    throw InvertedCellError("cell " + std::to_string(cell) +
                            " has non-positive Jacobian determinant " +
                            std::to_string(out.det));
  return out;
}

void move_mesh(Mesh& mesh, const Function& displacement, double scale) {
  const auto& space = displacement.space();
  if (&space.mesh() != &mesh || space.degree() != 1 ||
      space.value_size() != 2)
    throw ShapeError(
        "move_mesh: displacement must live on this mesh's vector P1 "
        "coordinate space");
  const auto& v = displacement.dofs();
  auto& coords = *mesh.coords_;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    mesh.displacement_[i] += scale * v[i];
    coords[i] = mesh.base_coords_[i] + mesh.displacement_[i];
  }
}

double validate_mesh(const Mesh& mesh) {
  double min_det = std::numeric_limits<double>::infinity();
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto& cell = mesh.cell(c);
    const Vec2 x0 = mesh.vertex(cell[0]);
    const Vec2 x1 = mesh.vertex(cell[1]);
    const Vec2 x2 = mesh.vertex(cell[2]);
    const double det = (x1[0] - x0[0]) * (x2[1] - x0[1]) -
                       (x2[0] - x0[0]) * (x1[1] - x0[1]);
    min_det = std::min(min_det, det);
  }
  return min_det;
}

namespace {

std::shared_ptr<Mesh> structured_rectangle(double x0, double y0, double x1,
                                           double y1, int nx, int ny) {
  std::vector<Vec2> vertices;
  vertices.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1)));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      vertices.push_back({x0 + (x1 - x0) * i / nx, y0 + (y1 - y0) * j / ny});

  const auto vid = [nx](int i, int j) { return j * (nx + 1) + i; };

  std::vector<std::array<int, 3>> cells;
  cells.reserve(static_cast<std::size_t>(2 * nx * ny));
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      // Split each square along its up diagonal, counter-clockwise.
      cells.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
      cells.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
    }

  std::vector<std::array<int, 3>> markers;
  for (int j = 0; j < ny; ++j) {
    markers.push_back({vid(0, j), vid(0, j + 1), 1});
    markers.push_back({vid(nx, j), vid(nx, j + 1), 2});
  }
  for (int i = 0; i < nx; ++i) {
    markers.push_back({vid(i, 0), vid(i + 1, 0), 3});
    markers.push_back({vid(i, ny), vid(i + 1, ny), 4});
  }
  return Mesh::create(vertices, std::move(cells), markers);
}

}  // namespace

std::shared_ptr<Mesh> unit_square_mesh(int n) {
  if (n < 1) throw Error("unit_square_mesh: n must be positive");
  return structured_rectangle(0, 0, 1, 1, n, n);
}

std::shared_ptr<Mesh> channel_mesh(int nx, int ny) {
  if (nx < 1 || ny < 1) throw Error("channel_mesh: nx, ny must be positive");
  return structured_rectangle(0, 0, 3, 1, nx, ny);
}

std::shared_ptr<Mesh> annulus_sector_mesh(int nr, int nt) {
  if (nr < 1 || nt < 1)
    throw Error("annulus_sector_mesh: nr, nt must be positive");
  const double pi = 3.14159265358979323846;
  std::vector<Vec2> vertices;
  for (int j = 0; j <= nt; ++j)
    for (int i = 0; i <= nr; ++i) {
      const double r = 1.0 + static_cast<double>(i) / nr;
      const double t = 0.5 * pi * static_cast<double>(j) / nt;
      vertices.push_back({r * std::cos(t), r * std::sin(t)});
    }
  const auto vid = [nr](int i, int j) { return j * (nr + 1) + i; };

  std::vector<std::array<int, 3>> cells;
  for (int j = 0; j < nt; ++j)
    for (int i = 0; i < nr; ++i) {
      cells.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
      cells.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
    }

  std::vector<std::array<int, 3>> markers;
  for (int j = 0; j < nt; ++j) {
    markers.push_back({vid(0, j), vid(0, j + 1), 1});
    markers.push_back({vid(nr, j), vid(nr, j + 1), 2});
  }
  for (int i = 0; i < nr; ++i) {
    markers.push_back({vid(i, 0), vid(i + 1, 0), 3});
    markers.push_back({vid(i, nt), vid(i + 1, nt), 4});
  }
  return Mesh::create(vertices, std::move(cells), markers);
}

}  // namespace formgrad
