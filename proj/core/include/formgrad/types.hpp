// Copyright (c) 2026 The formgrad authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <string>

namespace formgrad {

using Vec2 = std::array<double, 2>;
using Mat22 = std::array<double, 4>;  // row-major: {a00, a01, a10, a11}

/// Value shape of an expression or finite element function: scalar,
/// 2-vector, or 2x2 matrix. All tensors in this library live in 2D.
enum class ValueShape : std::uint8_t { Scalar, Vector, Matrix };

constexpr int value_size(ValueShape s) {
  switch (s) {
    case ValueShape::Scalar: return 1;
    case ValueShape::Vector: return 2;
    case ValueShape::Matrix: return 4;
  }
  return 0;
}

std::string to_string(ValueShape s);

/// A runtime value at an evaluation point. Tagged by shape; unused slots
/// of `data` are zero.
struct Value {
  ValueShape shape = ValueShape::Scalar;
  std::array<double, 4> data{};

  static Value scalar(double v) { return {ValueShape::Scalar, {v, 0, 0, 0}}; }
  static Value vector(double x, double y) {
    return {ValueShape::Vector, {x, y, 0, 0}};
  }
  static Value vector(const Vec2& v) { return vector(v[0], v[1]); }
  static Value matrix(double a00, double a01, double a10, double a11) {
    return {ValueShape::Matrix, {a00, a01, a10, a11}};
  }
  static Value zero(ValueShape s) { return {s, {0, 0, 0, 0}}; }

  double& operator[](int i) { return data[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return data[static_cast<std::size_t>(i)]; }
};

/// Deterministic seeded generator used by tests, Taylor harnesses and the
/// CLI. The [0,1) mapping uses the top 53 bits of the engine output so the
/// stream is identical across platforms and standard library versions.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  /// Uniform in [-1, 1].
  double symmetric() { return 2.0 * uniform() - 1.0; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace formgrad
