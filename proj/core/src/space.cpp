// Copyright (c) 2026 The formgrad authors
// SPDX-License-Identifier: Apache-2.0

#include "formgrad/space.hpp"

#include <atomic>
#include <cmath>

namespace formgrad {

namespace {
std::atomic<int> next_function_id{0};
}

LagrangeBasis::LagrangeBasis(int degree, int value_size)
    : degree_(degree), value_size_(value_size) {
  if (degree != 1 && degree != 2)
    throw Error("LagrangeBasis: degree must be 1 or 2");
  if (value_size != 1 && value_size != 2)
    throw Error("LagrangeBasis: value size must be 1 or 2");
}

Vec2 LagrangeBasis::node(int m) const {
  static constexpr std::array<Vec2, 6> nodes{{{0.0, 0.0},
                                              {1.0, 0.0},
                                              {0.0, 1.0},
                                              {0.5, 0.5},
                                              {0.0, 0.5},
                                              {0.5, 0.0}}};
  return nodes[static_cast<std::size_t>(m)];
}

namespace {

// Barycentric L0 = 1-x-y, L1 = x, L2 = y.
void scalar_basis(int degree, const Vec2& p, double* vals, Vec2* grads) {
  const double l0 = 1.0 - p[0] - p[1], l1 = p[0], l2 = p[1];
  if (degree == 1) {
    vals[0] = l0;
    vals[1] = l1;
    vals[2] = l2;
    grads[0] = {-1.0, -1.0};
    grads[1] = {1.0, 0.0};
    grads[2] = {0.0, 1.0};
    return;
  }
  // P2: vertex functions, then edge m opposite vertex m.
  vals[0] = l0 * (2.0 * l0 - 1.0);
  vals[1] = l1 * (2.0 * l1 - 1.0);
  vals[2] = l2 * (2.0 * l2 - 1.0);
  vals[3] = 4.0 * l1 * l2;
  vals[4] = 4.0 * l0 * l2;
  vals[5] = 4.0 * l0 * l1;
  const double g0 = 4.0 * l0 - 1.0;
  const double g1 = 4.0 * l1 - 1.0;
  const double g2 = 4.0 * l2 - 1.0;
  grads[0] = {-g0, -g0};
  grads[1] = {g1, 0.0};
  grads[2] = {0.0, g2};
  grads[3] = {4.0 * l2, 4.0 * l1};
  grads[4] = {-4.0 * l2, 4.0 * (l0 - l2)};
  grads[5] = {4.0 * (l0 - l1), -4.0 * l1};
}

}  // namespace

void LagrangeBasis::tabulate(std::span<const Vec2> points,
                             std::vector<Value>& values,
                             std::vector<Value>& gradients) const {
  const int ns = num_scalar_nodes();
  const int nd = num_dofs();
  values.assign(points.size() * static_cast<std::size_t>(nd), Value{});
  gradients.assign(points.size() * static_cast<std::size_t>(nd), Value{});

  double v[6];
  Vec2 g[6];
  for (std::size_t q = 0; q < points.size(); ++q) {
    scalar_basis(degree_, points[q], v, g);
    for (int m = 0; m < ns; ++m) {
      if (value_size_ == 1) {
        values[q * static_cast<std::size_t>(nd) + static_cast<std::size_t>(m)] =
            Value::scalar(v[m]);
        gradients[q * static_cast<std::size_t>(nd) +
                  static_cast<std::size_t>(m)] = Value::vector(g[m]);
      } else {
        for (int c = 0; c < 2; ++c) {
          const std::size_t dof =
              q * static_cast<std::size_t>(nd) +
              static_cast<std::size_t>(2 * m + c);
          Value val = Value::zero(ValueShape::Vector);
          val[c] = v[m];
          values[dof] = val;
          // Gradient of (b e_c): row c is grad b, the other row zero.
          Value gr = Value::zero(ValueShape::Matrix);
          gr[2 * c + 0] = g[m][0];
          gr[2 * c + 1] = g[m][1];
          gradients[dof] = gr;
        }
      }
    }
  }
}

FunctionSpace::FunctionSpace(const Mesh* mesh, std::shared_ptr<const Mesh> owned,
                             int degree, int value_size)
    : mesh_(mesh), owned_mesh_(std::move(owned)), basis_(degree, value_size) {
  const int nv = mesh_->num_vertices();
  const int ne = static_cast<int>(mesh_->edges().size());
  const int scalar_dim = degree == 1 ? nv : nv + ne;
  dim_ = scalar_dim * value_size;

  const int ns = basis_.num_scalar_nodes();
  cell_dofs_.resize(static_cast<std::size_t>(mesh_->num_cells()) *
                    static_cast<std::size_t>(basis_.num_dofs()));
  for (int c = 0; c < mesh_->num_cells(); ++c) {
    const auto& cell = mesh_->cell(c);
    int scalar_dofs[6];
    scalar_dofs[0] = cell[0];
    scalar_dofs[1] = cell[1];
    scalar_dofs[2] = cell[2];
    if (degree == 2) {
      const auto& ce = mesh_->cell_edges(c);
      scalar_dofs[3] = nv + ce[0];
      scalar_dofs[4] = nv + ce[1];
      scalar_dofs[5] = nv + ce[2];
    }
    int* dst = cell_dofs_.data() +
               static_cast<std::size_t>(c) *
                   static_cast<std::size_t>(basis_.num_dofs());
    for (int m = 0; m < ns; ++m) {
      if (value_size == 1) {
        dst[m] = scalar_dofs[m];
      } else {
        dst[2 * m + 0] = 2 * scalar_dofs[m] + 0;
        dst[2 * m + 1] = 2 * scalar_dofs[m] + 1;
      }
    }
  }
}

std::shared_ptr<const FunctionSpace> FunctionSpace::create(
    std::shared_ptr<const Mesh> mesh, int degree, int value_size) {
  const Mesh* raw = mesh.get();
  return std::shared_ptr<const FunctionSpace>(
      new FunctionSpace(raw, std::move(mesh), degree, value_size));
}

std::shared_ptr<const FunctionSpace> FunctionSpace::create_view(
    const Mesh& mesh, int degree, int value_size) {
  return std::shared_ptr<const FunctionSpace>(
      new FunctionSpace(&mesh, nullptr, degree, value_size));
}

std::vector<Vec2> FunctionSpace::scalar_node_coordinates() const {
  const int nv = mesh_->num_vertices();
  std::vector<Vec2> out;
  out.reserve(static_cast<std::size_t>(num_scalar_nodes()));
  for (int v = 0; v < nv; ++v) out.push_back(mesh_->vertex(v));
  if (degree() == 2)
    for (const auto& e : mesh_->edges()) {
      const Vec2 a = mesh_->vertex(e[0]);
      const Vec2 b = mesh_->vertex(e[1]);
      out.push_back({0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])});
    }
  return out;
}

bool FunctionSpace::same_space(const FunctionSpace& other) const {
  return this == &other ||
         (mesh_ == other.mesh_ && degree() == other.degree() &&
          value_size() == other.value_size());
}

Function::Function(std::shared_ptr<const FunctionSpace> space, std::string name)
    : space_(std::move(space)),
      dofs_(std::make_shared<std::vector<double>>(
          static_cast<std::size_t>(space_->dim()), 0.0)),
      id_(next_function_id++),
      name_(std::move(name)) {}

Function::Function(std::shared_ptr<const FunctionSpace> space,
                   std::shared_ptr<std::vector<double>> dofs, std::string name)
    : space_(std::move(space)),
      dofs_(std::move(dofs)),
      id_(next_function_id++),
      name_(std::move(name)) {
  if (dofs_->size() != static_cast<std::size_t>(space_->dim()))
    throw Error("Function: dof storage size does not match the space");
}

Function Function::clone(std::string name) const {
  Function out(space_, name.empty() ? name_ : std::move(name));
  out.dofs() = dofs();
  return out;
}

namespace {

Value eval_point_impl(const Expr& e, const Vec2& x) {
  using K = ExprKind;
  switch (e->kind()) {
    case K::Constant:
      return {e->shape(), e->literal()};
    case K::SpatialCoordinate:
      return Value::vector(x);
    case K::Sum: {
      Value a = eval_point_impl(e->child(0), x);
      const Value b = eval_point_impl(e->child(1), x);
      for (int i = 0; i < value_size(a.shape); ++i) a[i] += b[i];
      return a;
    }
    case K::Product: {
      Value a = eval_point_impl(e->child(0), x);
      Value b = eval_point_impl(e->child(1), x);
      if (a.shape != ValueShape::Scalar) std::swap(a, b);
      for (int i = 0; i < value_size(b.shape); ++i) b[i] *= a[0];
      return b;
    }
    case K::Division: {
      Value a = eval_point_impl(e->child(0), x);
      const Value b = eval_point_impl(e->child(1), x);
      for (int i = 0; i < value_size(a.shape); ++i) a[i] /= b[0];
      return a;
    }
    case K::Inner: {
      const Value a = eval_point_impl(e->child(0), x);
      const Value b = eval_point_impl(e->child(1), x);
      double s = 0;
      for (int i = 0; i < value_size(a.shape); ++i) s += a[i] * b[i];
      return Value::scalar(s);
    }
    case K::Dot: {
      const Value a = eval_point_impl(e->child(0), x);
      const Value b = eval_point_impl(e->child(1), x);
      if (a.shape == ValueShape::Vector && b.shape == ValueShape::Vector)
        return Value::scalar(a[0] * b[0] + a[1] * b[1]);
      throw Error("eval_at_point: unsupported dot operands");
    }
    case K::Power: {
      const Value a = eval_point_impl(e->child(0), x);
      return Value::scalar(std::pow(a[0], e->int_payload()));
    }
    case K::Sign: {
      const double a = eval_point_impl(e->child(0), x)[0];
      return Value::scalar(a > 0 ? 1.0 : (a < 0 ? -1.0 : 0.0));
    }
    case K::Abs:
      return Value::scalar(std::abs(eval_point_impl(e->child(0), x)[0]));
    case K::Sqrt:
      return Value::scalar(std::sqrt(eval_point_impl(e->child(0), x)[0]));
    case K::Sin:
      return Value::scalar(std::sin(eval_point_impl(e->child(0), x)[0]));
    case K::Cos:
      return Value::scalar(std::cos(eval_point_impl(e->child(0), x)[0]));
    default:
      throw Error(
          "eval_at_point: expression is not a closed form of the spatial "
          "coordinate (node " +
          to_sexpr(e) + ")");
  }
}

}  // namespace

Value eval_at_point(const Expr& e, const Vec2& x) {
  return eval_point_impl(e, x);
}

double eval_scalar_at_point(const Expr& e, const Vec2& x) {
  const Value v = eval_point_impl(e, x);
  if (v.shape != ValueShape::Scalar)
    throw ShapeError("eval_scalar_at_point: expression is not scalar");
  return v[0];
}

void interpolate(const Expr& e, Function& f) {
  const auto& space = f.space();
  if (e->shape() != space.value_shape())
    throw ShapeError("interpolate: expression shape " + to_string(e->shape()) +
                     " does not match space shape " +
                     to_string(space.value_shape()));
  const auto nodes = space.scalar_node_coordinates();
  auto& dofs = f.dofs();
  const int vs = space.value_size();
  for (int m = 0; m < static_cast<int>(nodes.size()); ++m) {
    const Value v = eval_at_point(e, nodes[static_cast<std::size_t>(m)]);
    for (int c = 0; c < vs; ++c)
      dofs[static_cast<std::size_t>(vs * m + c)] = v[c];
  }
}

}  // namespace formgrad
