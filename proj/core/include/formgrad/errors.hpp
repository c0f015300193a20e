// Copyright (c) 2026 The formgrad authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace formgrad {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Incompatible value shapes at expression construction or substitution.
struct ShapeError : Error {
  using Error::Error;
};

/// A cell map with non-positive determinant was encountered where a valid
/// (positively oriented) cell is required.
struct InvertedCellError : Error {
  using Error::Error;
};

struct SingularMatrixError : Error {
  using Error::Error;
};

struct NonConvergenceError : Error {
  using Error::Error;
};

struct IOError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace formgrad
