// Copyright (c) 2026 The formgrad authors
// SPDX-License-Identifier: Apache-2.0

#include "formgrad/assemble.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <thread>

#include "formgrad/quadrature.hpp"
#include "formgrad/space.hpp"

namespace formgrad {

namespace {
std::atomic<int> g_default_threads{1};
}

int default_assembly_threads() { return g_default_threads.load(); }

void set_default_assembly_threads(int threads) {
  g_default_threads.store(std::max(1, threads));
}

namespace {

// ---------------------------------------------------------------------------
// Value algebra

Value v_sum(const Value& a, const Value& b) {
  Value out = a;
  for (int i = 0; i < value_size(a.shape); ++i) out[i] += b[i];
  return out;
}

Value v_product(const Value& a, const Value& b) {
  const Value& s = a.shape == ValueShape::Scalar ? a : b;
  Value out = a.shape == ValueShape::Scalar ? b : a;
  for (int i = 0; i < value_size(out.shape); ++i) out[i] *= s[0];
  return out;
}

Value v_division(const Value& a, const Value& b) {
  Value out = a;
  for (int i = 0; i < value_size(a.shape); ++i) out[i] /= b[0];
  return out;
}

Value v_inner(const Value& a, const Value& b) {
  double s = 0.0;
  for (int i = 0; i < value_size(a.shape); ++i) s += a[i] * b[i];
  return Value::scalar(s);
}

Value v_dot(const Value& a, const Value& b) {
  if (a.shape == ValueShape::Vector && b.shape == ValueShape::Vector)
    return Value::scalar(a[0] * b[0] + a[1] * b[1]);
  if (a.shape == ValueShape::Matrix && b.shape == ValueShape::Vector)
    return Value::vector(a[0] * b[0] + a[1] * b[1], a[2] * b[0] + a[3] * b[1]);
  if (a.shape == ValueShape::Vector && b.shape == ValueShape::Matrix)
    return Value::vector(a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3]);
  // matrix * matrix
  return Value::matrix(a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
                       a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]);
}

Value v_outer(const Value& a, const Value& b) {
  return Value::matrix(a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]);
}

Value v_inverse(const Value& a) {
  const double d = a[0] * a[3] - a[1] * a[2];
  if (std::abs(d) < 1e-300)
    throw InvertedCellError("singular 2x2 matrix in integrand evaluation");
  return Value::matrix(a[3] / d, -a[1] / d, -a[2] / d, a[0] / d);
}

// ---------------------------------------------------------------------------
// Per-term evaluation machinery

struct FieldKey {
  bool is_argument = false;
  int id = 0;  // function id or argument number
  bool operator<(const FieldKey& o) const {
    return std::tie(is_argument, id) < std::tie(o.is_argument, o.id);
  }
};

struct FieldInfo {
  std::shared_ptr<const FunctionSpace> space;
  std::shared_ptr<const Function> function;  // null for arguments
  int argument_number = -1;
};

void collect_fields(const Expr& e, std::map<FieldKey, FieldInfo>& fields) {
  if (e->kind() == ExprKind::RefValue || e->kind() == ExprKind::RefGrad) {
    const Expr& t = e->child(0);
    if (t->kind() == ExprKind::Coefficient) {
      FieldInfo info;
      info.space = t->coefficient()->space_ptr();
      info.function = t->coefficient();
      fields.emplace(FieldKey{false, t->coefficient()->id()}, std::move(info));
    } else {
      FieldInfo info;
      info.space = t->argument_space();
      info.argument_number = t->int_payload();
      fields.emplace(FieldKey{true, t->int_payload()}, std::move(info));
    }
    return;
  }
  using K = ExprKind;
  switch (e->kind()) {
    case K::SpatialCoordinate:
    case K::FacetNormal:
    case K::Coefficient:
    case K::Argument:
    case K::Grad:
    case K::Div:
      throw Error("assemble: integrand was not pulled back (found " +
                  std::string(e->kind() == K::Grad ? "physical gradient"
                                                   : "physical terminal") +
                  ")");
    default:
      break;
  }
  for (const auto& c : e->children()) collect_fields(c, fields);
}

/// Basis tables at a fixed set of reference points, one per distinct space.
struct SpaceTab {
  std::shared_ptr<const FunctionSpace> space;
  std::vector<Value> values;     // [q][dof]
  std::vector<Value> gradients;  // [q][dof]

  const Value& value(int q, int dof) const {
    return values[static_cast<std::size_t>(q * space->dofs_per_cell() + dof)];
  }
  const Value& gradient(int q, int dof) const {
    return gradients[static_cast<std::size_t>(q * space->dofs_per_cell() +
                                              dof)];
  }
};

/// Evaluation state for one (cell, quadrature point) and optional local
/// test/trial dof binding.
struct EvalCtx {
  // Coefficient values/gradients at the current point, keyed by function id.
  const std::map<int, std::pair<Value, Value>>* coeffs = nullptr;
  // Argument bindings: table, current local dof, current point.
  struct ArgBinding {
    const SpaceTab* tab = nullptr;
    int local_dof = -1;
  };
  std::array<ArgBinding, 2> args{};
  int q = 0;
  const Vec2* ref_normal = nullptr;
};

Value evaluate(const Expr& e, const EvalCtx& ctx) {
  using K = ExprKind;
  switch (e->kind()) {
    case K::Constant:
      return {e->shape(), e->literal()};
    case K::ReferenceNormal:
      if (ctx.ref_normal == nullptr)
        throw Error("assemble: reference normal outside a facet integral");
      return Value::vector(*ctx.ref_normal);
    case K::RefValue:
    case K::RefGrad: {
      const bool want_value = e->kind() == K::RefValue;
      const Expr& t = e->child(0);
      if (t->kind() == ExprKind::Coefficient) {
        const auto& pair = ctx.coeffs->at(t->coefficient()->id());
        return want_value ? pair.first : pair.second;
      }
      const auto& binding =
          ctx.args[static_cast<std::size_t>(t->int_payload())];
      if (binding.tab == nullptr)
        throw Error("assemble: unbound argument " +
                    std::to_string(t->int_payload()) +
                    " (form arity mismatch)");
      return want_value ? binding.tab->value(ctx.q, binding.local_dof)
                        : binding.tab->gradient(ctx.q, binding.local_dof);
    }
    case K::Sum:
      return v_sum(evaluate(e->child(0), ctx), evaluate(e->child(1), ctx));
    case K::Product:
      return v_product(evaluate(e->child(0), ctx), evaluate(e->child(1), ctx));
    case K::Division:
      return v_division(evaluate(e->child(0), ctx), evaluate(e->child(1), ctx));
    case K::Inner:
      return v_inner(evaluate(e->child(0), ctx), evaluate(e->child(1), ctx));
    case K::Dot:
      return v_dot(evaluate(e->child(0), ctx), evaluate(e->child(1), ctx));
    case K::Outer:
      return v_outer(evaluate(e->child(0), ctx), evaluate(e->child(1), ctx));
    case K::Transpose: {
      const Value a = evaluate(e->child(0), ctx);
      return Value::matrix(a[0], a[2], a[1], a[3]);
    }
    case K::Trace: {
      const Value a = evaluate(e->child(0), ctx);
      return Value::scalar(a[0] + a[3]);
    }
    case K::Det: {
      const Value a = evaluate(e->child(0), ctx);
      return Value::scalar(a[0] * a[3] - a[1] * a[2]);
    }
    case K::Inverse:
      return v_inverse(evaluate(e->child(0), ctx));
    case K::Power:
      return Value::scalar(
          std::pow(evaluate(e->child(0), ctx)[0], e->int_payload()));
    case K::Sign: {
      const double a = evaluate(e->child(0), ctx)[0];
      return Value::scalar(a > 0 ? 1.0 : (a < 0 ? -1.0 : 0.0));
    }
    case K::Abs:
      return Value::scalar(std::abs(evaluate(e->child(0), ctx)[0]));
    case K::Sqrt:
      return Value::scalar(std::sqrt(evaluate(e->child(0), ctx)[0]));
    case K::Sin:
      return Value::scalar(std::sin(evaluate(e->child(0), ctx)[0]));
    case K::Cos:
      return Value::scalar(std::cos(evaluate(e->child(0), ctx)[0]));
    default:
      throw Error("assemble: integrand was not pulled back");
  }
}

struct TermPlan {
  const ReferenceIntegrand* ri = nullptr;
  QuadratureRule rule;
  std::map<FieldKey, FieldInfo> fields;
  // Distinct spaces (by dofmap identity) used by the fields.
  std::vector<std::shared_ptr<const FunctionSpace>> spaces;
  std::map<FieldKey, int> space_of_field;

  int find_space(const FunctionSpace& s) const {
    for (int i = 0; i < static_cast<int>(spaces.size()); ++i)
      if (spaces[static_cast<std::size_t>(i)]->same_space(s)) return i;
    return -1;
  }
};

TermPlan plan_term(const ReferenceIntegrand& ri) {
  TermPlan plan;
  plan.ri = &ri;
  plan.rule = quadrature(ri.measure == Measure::Cell ? CellKind::Triangle
                                                     : CellKind::Interval,
                         ri.quad_degree);
  collect_fields(ri.expr, plan.fields);
  for (const auto& [key, info] : plan.fields) {
    int idx = plan.find_space(*info.space);
    if (idx < 0) {
      plan.spaces.push_back(info.space);
      idx = static_cast<int>(plan.spaces.size()) - 1;
    }
    plan.space_of_field[key] = idx;
  }
  return plan;
}

std::vector<SpaceTab> tabulate_spaces(const TermPlan& plan,
                                      std::span<const Vec2> points) {
  std::vector<SpaceTab> tabs;
  tabs.reserve(plan.spaces.size());
  for (const auto& s : plan.spaces) {
    SpaceTab tab;
    tab.space = s;
    s->basis().tabulate(points, tab.values, tab.gradients);
    tabs.push_back(std::move(tab));
  }
  return tabs;
}

/// Accumulator for one thread (or the single reference thread).
struct Partial {
  double scalar = 0.0;
  std::vector<double> vector;
  std::vector<double> matrix_values;
};

struct ArgumentPlan {
  // Space table index per argument number present in the term.
  int tab0 = -1;
  int tab1 = -1;
};

ArgumentPlan argument_plan(const TermPlan& plan, int rank) {
  ArgumentPlan ap;
  for (const auto& [key, info] : plan.fields) {
    if (!key.is_argument) continue;
    if (key.id >= rank)
      throw Error("assemble: argument number exceeds the form arity");
    (key.id == 0 ? ap.tab0 : ap.tab1) = plan.space_of_field.at(key);
  }
  if (rank >= 1 && ap.tab0 < 0)
    throw Error("assemble: term is missing the test argument");
  if (rank >= 2 && ap.tab1 < 0)
    throw Error("assemble: term is missing the trial argument");
  return ap;
}

void assemble_cells_range(const TermPlan& plan,
                          const std::vector<SpaceTab>& tabs, int rank,
                          const CSRMatrix* pattern, int cell_begin,
                          int cell_end, Partial& out) {
  const auto& rule = plan.rule;
  const int nq = rule.num_points();
  const ArgumentPlan ap = argument_plan(plan, rank);

  std::map<int, std::pair<Value, Value>> coeff_values;
  EvalCtx ctx;
  ctx.coeffs = &coeff_values;

  std::vector<double> local;  // rank 1: n0; rank 2: n0*n1 row-major
  for (int cell = cell_begin; cell < cell_end; ++cell) {
    // Gather local dofs of each coefficient once per cell.
    std::map<int, std::vector<double>> local_dofs;
    for (const auto& [key, info] : plan.fields) {
      if (key.is_argument) continue;
      const auto dofs = info.space->cell_dofs(cell);
      auto& ld = local_dofs[key.id];
      ld.resize(dofs.size());
      const auto& global = info.function->dofs();
      for (std::size_t m = 0; m < dofs.size(); ++m)
        ld[m] = global[static_cast<std::size_t>(dofs[m])];
    }

    const int n0 = ap.tab0 >= 0
                       ? tabs[static_cast<std::size_t>(ap.tab0)].space->dofs_per_cell()
                       : 0;
    const int n1 = ap.tab1 >= 0
                       ? tabs[static_cast<std::size_t>(ap.tab1)].space->dofs_per_cell()
                       : 0;
    if (rank == 1)
      local.assign(static_cast<std::size_t>(n0), 0.0);
    else if (rank == 2)
      local.assign(static_cast<std::size_t>(n0) * static_cast<std::size_t>(n1),
                   0.0);

    for (int q = 0; q < nq; ++q) {
      ctx.q = q;
      // Resolve coefficient values and reference gradients at this point.
      for (const auto& [key, info] : plan.fields) {
        if (key.is_argument) continue;
        const auto& tab =
            tabs[static_cast<std::size_t>(plan.space_of_field.at(key))];
        const auto& ld = local_dofs[key.id];
        const ValueShape vshape = info.space->value_shape();
        Value val = Value::zero(vshape);
        Value gr = Value::zero(vshape == ValueShape::Scalar
                                   ? ValueShape::Vector
                                   : ValueShape::Matrix);
        for (int m = 0; m < info.space->dofs_per_cell(); ++m) {
          const double c = ld[static_cast<std::size_t>(m)];
          const Value& bv = tab.value(q, m);
          const Value& bg = tab.gradient(q, m);
          for (int i = 0; i < value_size(val.shape); ++i) val[i] += c * bv[i];
          for (int i = 0; i < value_size(gr.shape); ++i) gr[i] += c * bg[i];
        }
        coeff_values[key.id] = {val, gr};
      }

      const double w = rule.weights[static_cast<std::size_t>(q)];
      if (rank == 0) {
        ctx.args = {};
        out.scalar += w * evaluate(plan.ri->expr, ctx)[0];
      } else if (rank == 1) {
        ctx.args[0].tab = &tabs[static_cast<std::size_t>(ap.tab0)];
        for (int i = 0; i < n0; ++i) {
          ctx.args[0].local_dof = i;
          local[static_cast<std::size_t>(i)] +=
              w * evaluate(plan.ri->expr, ctx)[0];
        }
      } else {
        ctx.args[0].tab = &tabs[static_cast<std::size_t>(ap.tab0)];
        ctx.args[1].tab = &tabs[static_cast<std::size_t>(ap.tab1)];
        for (int i = 0; i < n0; ++i) {
          ctx.args[0].local_dof = i;
          for (int j = 0; j < n1; ++j) {
            ctx.args[1].local_dof = j;
            local[static_cast<std::size_t>(i * n1 + j)] +=
                w * evaluate(plan.ri->expr, ctx)[0];
          }
        }
      }
    }

    // Scatter.
    if (rank == 1) {
      const auto dofs0 =
          tabs[static_cast<std::size_t>(ap.tab0)].space->cell_dofs(cell);
      for (int i = 0; i < n0; ++i)
        out.vector[static_cast<std::size_t>(dofs0[static_cast<std::size_t>(i)])] +=
            local[static_cast<std::size_t>(i)];
    } else if (rank == 2) {
      const auto dofs0 =
          tabs[static_cast<std::size_t>(ap.tab0)].space->cell_dofs(cell);
      const auto dofs1 =
          tabs[static_cast<std::size_t>(ap.tab1)].space->cell_dofs(cell);
      for (int i = 0; i < n0; ++i) {
        const int gi = dofs0[static_cast<std::size_t>(i)];
        const int lo = pattern->row_ptr()[static_cast<std::size_t>(gi)];
        const int hi = pattern->row_ptr()[static_cast<std::size_t>(gi) + 1];
        for (int j = 0; j < n1; ++j) {
          const int gj = dofs1[static_cast<std::size_t>(j)];
          // Binary search within the row.
          int k = lo, k1 = hi;
          while (k < k1) {
            const int mid = (k + k1) / 2;
            if (pattern->col_idx()[static_cast<std::size_t>(mid)] < gj)
              k = mid + 1;
            else
              k1 = mid;
          }
          out.matrix_values[static_cast<std::size_t>(k)] +=
              local[static_cast<std::size_t>(i * n1 + j)];
        }
      }
    }
  }
}

void assemble_facets(const TermPlan& plan, int rank, const CSRMatrix* pattern,
                     Partial& out) {
  const Mesh& mesh = *plan.ri->mesh;
  const auto& rule = plan.rule;
  const int nq = rule.num_points();
  const ArgumentPlan ap = argument_plan(plan, rank);

  // Tabulations per local edge, computed lazily.
  std::array<std::vector<SpaceTab>, 3> edge_tabs;
  std::array<bool, 3> have_tab{false, false, false};

  std::map<int, std::pair<Value, Value>> coeff_values;
  EvalCtx ctx;
  ctx.coeffs = &coeff_values;

  std::vector<double> local;
  for (const auto& facet : mesh.exterior_facets()) {
    if (plan.ri->subdomain != kEverywhere && facet.marker != plan.ri->subdomain)
      continue;
    const int le = facet.local_edge;
    if (!have_tab[static_cast<std::size_t>(le)]) {
      std::vector<Vec2> pts;
      pts.reserve(static_cast<std::size_t>(nq));
      for (int q = 0; q < nq; ++q)
        pts.push_back(ReferenceTriangle::edge_point(
            le, rule.points[static_cast<std::size_t>(q)][0]));
      edge_tabs[static_cast<std::size_t>(le)] = tabulate_spaces(plan, pts);
      have_tab[static_cast<std::size_t>(le)] = true;
    }
    const auto& tabs = edge_tabs[static_cast<std::size_t>(le)];
    const Vec2 ref_normal =
        ReferenceTriangle::edge_normals()[static_cast<std::size_t>(le)];
    const double edge_scale =
        ReferenceTriangle::edge_lengths()[static_cast<std::size_t>(le)];
    ctx.ref_normal = &ref_normal;

    const int cell = facet.cell;
    std::map<int, std::vector<double>> local_dofs;
    for (const auto& [key, info] : plan.fields) {
      if (key.is_argument) continue;
      const auto dofs = info.space->cell_dofs(cell);
      auto& ld = local_dofs[key.id];
      ld.resize(dofs.size());
      const auto& global = info.function->dofs();
      for (std::size_t m = 0; m < dofs.size(); ++m)
        ld[m] = global[static_cast<std::size_t>(dofs[m])];
    }

    const int n0 = ap.tab0 >= 0
                       ? tabs[static_cast<std::size_t>(ap.tab0)].space->dofs_per_cell()
                       : 0;
    const int n1 = ap.tab1 >= 0
                       ? tabs[static_cast<std::size_t>(ap.tab1)].space->dofs_per_cell()
                       : 0;
    if (rank == 1)
      local.assign(static_cast<std::size_t>(n0), 0.0);
    else if (rank == 2)
      local.assign(static_cast<std::size_t>(n0) * static_cast<std::size_t>(n1),
                   0.0);

    for (int q = 0; q < nq; ++q) {
      ctx.q = q;
      for (const auto& [key, info] : plan.fields) {
        if (key.is_argument) continue;
        const auto& tab =
            tabs[static_cast<std::size_t>(plan.space_of_field.at(key))];
        const auto& ld = local_dofs[key.id];
        const ValueShape vshape = info.space->value_shape();
        Value val = Value::zero(vshape);
        Value gr = Value::zero(vshape == ValueShape::Scalar
                                   ? ValueShape::Vector
                                   : ValueShape::Matrix);
        for (int m = 0; m < info.space->dofs_per_cell(); ++m) {
          const double c = ld[static_cast<std::size_t>(m)];
          const Value& bv = tab.value(q, m);
          const Value& bg = tab.gradient(q, m);
          for (int i = 0; i < value_size(val.shape); ++i) val[i] += c * bv[i];
          for (int i = 0; i < value_size(gr.shape); ++i) gr[i] += c * bg[i];
        }
        coeff_values[key.id] = {val, gr};
      }

      const double w = rule.weights[static_cast<std::size_t>(q)] * edge_scale;
      if (rank == 0) {
        ctx.args = {};
        out.scalar += w * evaluate(plan.ri->expr, ctx)[0];
      } else if (rank == 1) {
        ctx.args[0].tab = &tabs[static_cast<std::size_t>(ap.tab0)];
        for (int i = 0; i < n0; ++i) {
          ctx.args[0].local_dof = i;
          local[static_cast<std::size_t>(i)] +=
              w * evaluate(plan.ri->expr, ctx)[0];
        }
      } else {
        ctx.args[0].tab = &tabs[static_cast<std::size_t>(ap.tab0)];
        ctx.args[1].tab = &tabs[static_cast<std::size_t>(ap.tab1)];
        for (int i = 0; i < n0; ++i) {
          ctx.args[0].local_dof = i;
          for (int j = 0; j < n1; ++j) {
            ctx.args[1].local_dof = j;
            local[static_cast<std::size_t>(i * n1 + j)] +=
                w * evaluate(plan.ri->expr, ctx)[0];
          }
        }
      }
    }
    ctx.ref_normal = nullptr;

    if (rank == 1) {
      const auto dofs0 =
          tabs[static_cast<std::size_t>(ap.tab0)].space->cell_dofs(cell);
      for (int i = 0; i < n0; ++i)
        out.vector[static_cast<std::size_t>(dofs0[static_cast<std::size_t>(i)])] +=
            local[static_cast<std::size_t>(i)];
    } else if (rank == 2) {
      const auto dofs0 =
          tabs[static_cast<std::size_t>(ap.tab0)].space->cell_dofs(cell);
      const auto dofs1 =
          tabs[static_cast<std::size_t>(ap.tab1)].space->cell_dofs(cell);
      // Facet scatter shares the cell pattern.
      for (int i = 0; i < n0; ++i) {
        const int gi = dofs0[static_cast<std::size_t>(i)];
        const int lo = pattern->row_ptr()[static_cast<std::size_t>(gi)];
        const int hi = pattern->row_ptr()[static_cast<std::size_t>(gi) + 1];
        for (int j = 0; j < n1; ++j) {
          const int gj = dofs1[static_cast<std::size_t>(j)];
          int k = lo, k1 = hi;
          while (k < k1) {
            const int mid = (k + k1) / 2;
            if (pattern->col_idx()[static_cast<std::size_t>(mid)] < gj)
              k = mid + 1;
            else
              k1 = mid;
          }
          out.matrix_values[static_cast<std::size_t>(k)] +=
              local[static_cast<std::size_t>(i * n1 + j)];
        }
      }
    }
  }
}

}  // namespace

AssembledTensor assemble(const ReferenceForm& form,
                         std::span<const DirichletBC> bcs,
                         const AssembleOptions& options) {
  const int rank = form.arity;
  if (rank < 0 || rank > 2) throw Error("assemble: arity must be 0, 1 or 2");
  if (!form.mesh) throw Error("assemble: form has no mesh");

  AssembledTensor out;
  out.rank = rank;

  std::shared_ptr<const FunctionSpace> space0, space1;
  if (rank >= 1) {
    space0 = form.argument_space(0);
    if (!space0) throw Error("assemble: cannot determine the test space");
  }
  if (rank == 2) {
    space1 = form.argument_space(1);
    if (!space1) throw Error("assemble: cannot determine the trial space");
  }

  // Sparsity: all cell-coupled dof pairs, independent of the terms.
  if (rank == 2) {
    std::vector<std::pair<int, int>> entries;
    const Mesh& mesh = *form.mesh;
    entries.reserve(static_cast<std::size_t>(mesh.num_cells()) *
                    static_cast<std::size_t>(space0->dofs_per_cell()) *
                    static_cast<std::size_t>(space1->dofs_per_cell()));
    for (int c = 0; c < mesh.num_cells(); ++c) {
      const auto d0 = space0->cell_dofs(c);
      const auto d1 = space1->cell_dofs(c);
      for (int i : d0)
        for (int j : d1) entries.emplace_back(i, j);
    }
    out.matrix = CSRMatrix::from_pattern(space0->dim(), space1->dim(),
                                         std::move(entries));
  } else if (rank == 1) {
    out.vector.assign(static_cast<std::size_t>(space0->dim()), 0.0);
  }

  const int threads = std::max(1, options.threads);

  for (const auto& ri : form.terms) {
    if (is_zero(ri.expr)) continue;
    if (ri.measure == Measure::Cell && ri.subdomain != kEverywhere)
      throw Error("assemble: cell subdomains are not supported");
    const TermPlan plan = plan_term(ri);

    if (ri.measure == Measure::Cell) {
      const auto tabs = tabulate_spaces(plan, plan.rule.points);
      const int ncells = form.mesh->num_cells();
      const int nthreads = std::min(threads, std::max(1, ncells));

      std::vector<Partial> partials(static_cast<std::size_t>(nthreads));
      for (auto& p : partials) {
        if (rank == 1)
          p.vector.assign(static_cast<std::size_t>(space0->dim()), 0.0);
        else if (rank == 2)
          p.matrix_values.assign(out.matrix.values().size(), 0.0);
      }

      if (nthreads == 1) {
        assemble_cells_range(plan, tabs, rank, rank == 2 ? &out.matrix : nullptr,
                             0, ncells, partials[0]);
      } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(
            static_cast<std::size_t>(nthreads));
        const int chunk = (ncells + nthreads - 1) / nthreads;
        for (int t = 0; t < nthreads; ++t) {
          const int begin = t * chunk;
          const int end = std::min(ncells, begin + chunk);
          pool.emplace_back([&, t, begin, end] {
            try {
              assemble_cells_range(plan, tabs, rank,
                                   rank == 2 ? &out.matrix : nullptr, begin,
                                   end, partials[static_cast<std::size_t>(t)]);
            } catch (...) {
              errors[static_cast<std::size_t>(t)] = std::current_exception();
            }
          });
        }
        for (auto& th : pool) th.join();
        for (const auto& err : errors)
          if (err) std::rethrow_exception(err);
      }

      // Deterministic merge in thread order.
      for (const auto& p : partials) {
        out.scalar += p.scalar;
        for (std::size_t i = 0; i < p.vector.size(); ++i)
          out.vector[i] += p.vector[i];
        for (std::size_t i = 0; i < p.matrix_values.size(); ++i)
          out.matrix.values()[i] += p.matrix_values[i];
      }
    } else {
      Partial partial;
      if (rank == 1)
        partial.vector.assign(static_cast<std::size_t>(space0->dim()), 0.0);
      else if (rank == 2)
        partial.matrix_values.assign(out.matrix.values().size(), 0.0);
      assemble_facets(plan, rank, rank == 2 ? &out.matrix : nullptr, partial);
      out.scalar += partial.scalar;
      for (std::size_t i = 0; i < partial.vector.size(); ++i)
        out.vector[i] += partial.vector[i];
      for (std::size_t i = 0; i < partial.matrix_values.size(); ++i)
        out.matrix.values()[i] += partial.matrix_values[i];
    }
  }

  // Dirichlet elimination.
  if (!bcs.empty() && rank >= 1) {
    const auto dofs = constrained_dofs(bcs);
    if (rank == 1) {
      for (int d : dofs) out.vector[static_cast<std::size_t>(d)] = 0.0;
    } else {
      std::vector<char> flag(static_cast<std::size_t>(out.matrix.rows()), 0);
      for (int d : dofs) flag[static_cast<std::size_t>(d)] = 1;
      auto& vals = out.matrix.values();
      const auto& row_ptr = out.matrix.row_ptr();
      const auto& col_idx = out.matrix.col_idx();
      for (int i = 0; i < out.matrix.rows(); ++i)
        for (int k = row_ptr[static_cast<std::size_t>(i)];
             k < row_ptr[static_cast<std::size_t>(i) + 1]; ++k) {
          const int j = col_idx[static_cast<std::size_t>(k)];
          if (flag[static_cast<std::size_t>(i)] ||
              flag[static_cast<std::size_t>(j)])
            vals[static_cast<std::size_t>(k)] = i == j ? 1.0 : 0.0;
        }
    }
  }
  return out;
}

AssembledTensor assemble(const Form& form, std::span<const DirichletBC> bcs,
                         const AssembleOptions& options) {
  return assemble(pull_back(form), bcs, options);
}

double assemble_scalar(const Form& form, const AssembleOptions& options) {
  if (form.arity() != 0)
    throw Error("assemble_scalar: form arity is not zero");
  return assemble(form, {}, options).scalar;
}

}  // namespace formgrad
