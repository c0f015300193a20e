// Copyright (c) 2026 The formgrad authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>

#include "formgrad/bc.hpp"
#include "formgrad/pullback.hpp"
#include "formgrad/tensor.hpp"

namespace formgrad {

/// Process-wide default for AssembleOptions::threads, 1 unless raised
/// (e.g. by a CLI --threads flag). 1 is the bit-reproducible reference mode.
int default_assembly_threads();
void set_default_assembly_threads(int threads);

struct AssembleOptions {
  /// Number of worker threads for the cell loop. Any fixed count gives
  /// deterministic output for that count (per-thread partial tensors merged
  /// in thread order).
  int threads = default_assembly_threads();
};

/// Assembles a pulled-back form into a scalar (arity 0), vector (arity 1)
/// or CSR matrix (arity 2), looping cells and marked facets and evaluating
/// the reference integrands at quadrature points with tabulated bases.
///
/// Dirichlet conditions: rank 2 gets symmetric row/column elimination with
/// a unit diagonal; rank 1 gets constrained entries zeroed (homogeneous
/// lifting, the function is assumed to carry its boundary values).
AssembledTensor assemble(const ReferenceForm& form,
                         std::span<const DirichletBC> bcs = {},
                         const AssembleOptions& options = {});

/// Pulls back and assembles a physical-space form.
AssembledTensor assemble(const Form& form,
                         std::span<const DirichletBC> bcs = {},
                         const AssembleOptions& options = {});

double assemble_scalar(const Form& form, const AssembleOptions& options = {});

}  // namespace formgrad
