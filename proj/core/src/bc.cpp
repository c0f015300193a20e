// Copyright (c) 2026 The formgrad authors
// SPDX-License-Identifier: Apache-2.0

#include "formgrad/bc.hpp"

#include <algorithm>
#include <set>
#include <string>

namespace formgrad {

DirichletBC DirichletBC::zero(std::shared_ptr<const FunctionSpace> space,
                              std::vector<int> markers) {
  const Expr value = zero_expr(space->value_shape());
  return {std::move(markers), std::move(space), value};
}

std::vector<int> constrained_dofs(const DirichletBC& bc) {
  const auto& space = *bc.space;
  const auto& mesh = space.mesh();

  for (int m : bc.markers)
    if (!mesh.has_boundary_marker(m))
      throw Error("DirichletBC: marker " + std::to_string(m) +
                  " not present on the mesh boundary");

  const std::set<int> markers(bc.markers.begin(), bc.markers.end());
  const int nv = mesh.num_vertices();
  const int vs = space.value_size();

  std::set<int> scalar_nodes;
  for (const auto& f : mesh.exterior_facets()) {
    if (markers.find(f.marker) == markers.end()) continue;
    scalar_nodes.insert(f.v0);
    scalar_nodes.insert(f.v1);
    if (space.degree() == 2) {
      // The facet is an edge of its owning cell; its midpoint dof follows
      // the vertex block.
      const auto edge = f.v0 < f.v1 ? std::array<int, 2>{f.v0, f.v1}
                                    : std::array<int, 2>{f.v1, f.v0};
      const auto& edges = mesh.edges();
      const auto it = std::lower_bound(edges.begin(), edges.end(), edge);
      scalar_nodes.insert(nv + static_cast<int>(it - edges.begin()));
    }
  }

  std::vector<int> dofs;
  dofs.reserve(scalar_nodes.size() * static_cast<std::size_t>(vs));
  for (int node : scalar_nodes)
    for (int c = 0; c < vs; ++c) dofs.push_back(vs * node + c);
  std::sort(dofs.begin(), dofs.end());
  return dofs;
}

std::vector<int> constrained_dofs(std::span<const DirichletBC> bcs) {
  std::set<int> all;
  for (const auto& bc : bcs) {
    const auto d = constrained_dofs(bc);
    all.insert(d.begin(), d.end());
  }
  return {all.begin(), all.end()};
}

void apply_bc_to_function(Function& f, const DirichletBC& bc) {
  if (!bc.space->same_space(f.space()))
    throw Error("apply_bc_to_function: spaces differ");
  if (bc.value->shape() != bc.space->value_shape())
    throw ShapeError("DirichletBC: value shape does not match the space");

  const auto dofs = constrained_dofs(bc);
  const auto nodes = f.space().scalar_node_coordinates();
  const int vs = f.space().value_size();
  for (int dof : dofs) {
    const int node = dof / vs;
    const int comp = dof % vs;
    const Value v = eval_at_point(bc.value, nodes[static_cast<std::size_t>(node)]);
    f.dofs()[static_cast<std::size_t>(dof)] = v[comp];
  }
}

}  // namespace formgrad
