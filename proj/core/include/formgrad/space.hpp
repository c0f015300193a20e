// Copyright (c) 2026 The formgrad authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "formgrad/expr.hpp"
#include "formgrad/mesh.hpp"
#include "formgrad/types.hpp"

namespace formgrad {

/// Lagrange basis on the reference triangle, degree 1 or 2, scalar or
/// 2-vector valued. Vector bases interleave components: local dof m is
/// component m%2 of scalar node m/2, matching the interleaved global dof
/// ordering (x0,y0,x1,y1,...).
class LagrangeBasis {
 public:
  LagrangeBasis(int degree, int value_size);

  int degree() const { return degree_; }
  int value_size() const { return value_size_; }
  int num_scalar_nodes() const { return degree_ == 1 ? 3 : 6; }
  int num_dofs() const { return num_scalar_nodes() * value_size_; }
  ValueShape value_shape() const {
    return value_size_ == 1 ? ValueShape::Scalar : ValueShape::Vector;
  }

  /// Reference coordinates of scalar node m. P1: the vertices; P2: vertices
  /// then edge midpoints, edge m opposite vertex m.
  Vec2 node(int m) const;

  /// Tabulates values and reference gradients of every local dof at the
  /// given reference points. Output layout: [point][dof], flattened.
  /// Scalar basis: values are scalars, gradients vectors. Vector basis:
  /// values are vectors, gradients matrices (rows = value component).
  void tabulate(std::span<const Vec2> points, std::vector<Value>& values,
                std::vector<Value>& gradients) const;

 private:
  int degree_;
  int value_size_;
};

/// A Lagrange function space over a mesh: basis + cell-to-global dof map.
/// Vector dofs are interleaved. P2 adds one dof per mesh edge after the
/// vertex block.
///
/// Spaces created through create() share ownership of their mesh. The
/// coordinate space a Mesh carries internally is a non-owning view (the
/// mesh outlives it by construction).
class FunctionSpace {
 public:
  static std::shared_ptr<const FunctionSpace> create(
      std::shared_ptr<const Mesh> mesh, int degree, int value_size);

  const Mesh& mesh() const { return *mesh_; }
  int degree() const { return basis_.degree(); }
  int value_size() const { return basis_.value_size(); }
  ValueShape value_shape() const { return basis_.value_shape(); }
  const LagrangeBasis& basis() const { return basis_; }

  /// Global dimension (number of dofs).
  int dim() const { return dim_; }
  int dofs_per_cell() const { return basis_.num_dofs(); }

  std::span<const int> cell_dofs(int cell) const {
    auto n = static_cast<std::size_t>(dofs_per_cell());
    return {cell_dofs_.data() + static_cast<std::size_t>(cell) * n, n};
  }

  int num_scalar_nodes() const { return dim_ / value_size(); }

  /// Physical coordinates of every scalar node, computed from the current
  /// mesh geometry (P2 edge nodes at edge midpoints).
  std::vector<Vec2> scalar_node_coordinates() const;

  bool same_space(const FunctionSpace& other) const;

 private:
  friend class Mesh;

  FunctionSpace(const Mesh* mesh, std::shared_ptr<const Mesh> owned,
                int degree, int value_size);

  /// Non-owning view used for the mesh's internal coordinate space; breaks
  /// the ownership cycle mesh -> space -> mesh.
  static std::shared_ptr<const FunctionSpace> create_view(const Mesh& mesh,
                                                          int degree,
                                                          int value_size);

  const Mesh* mesh_;
  std::shared_ptr<const Mesh> owned_mesh_;  // empty for mesh-internal views
  LagrangeBasis basis_;
  std::vector<int> cell_dofs_;
  int dim_ = 0;
};

/// A finite element coefficient: a space plus a flat dof array.
///
/// Copies are shallow and share dof storage (a Function is a named symbol;
/// the copy *is* the same coefficient, as reflected by its id). Use clone()
/// for an independent deep copy. The mesh coordinate field is an ordinary
/// Function aliasing the vertex coordinate storage.
class Function {
 public:
  explicit Function(std::shared_ptr<const FunctionSpace> space,
                    std::string name = "");

  /// Wraps existing storage; used by Mesh for the coordinate field.
  Function(std::shared_ptr<const FunctionSpace> space,
           std::shared_ptr<std::vector<double>> dofs, std::string name);

  const FunctionSpace& space() const { return *space_; }
  const std::shared_ptr<const FunctionSpace>& space_ptr() const {
    return space_;
  }

  std::vector<double>& dofs() { return *dofs_; }
  const std::vector<double>& dofs() const { return *dofs_; }

  int id() const { return id_; }
  const std::string& name() const { return name_; }

  Function clone(std::string name = "") const;

 private:
  std::shared_ptr<const FunctionSpace> space_;
  std::shared_ptr<std::vector<double>> dofs_;
  int id_;
  std::string name_;
};

/// Evaluates a closed-form expression of the spatial coordinate (constants,
/// arithmetic, trig, ...) at a point. Throws for expressions containing
/// coefficients, arguments or derivatives.
Value eval_at_point(const Expr& e, const Vec2& x);
double eval_scalar_at_point(const Expr& e, const Vec2& x);

/// Nodal interpolation of a closed-form expression of x into f's space.
void interpolate(const Expr& e, Function& f);

}  // namespace formgrad
