// Copyright 2026 The socdiff Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "socdiff/types.hpp"

namespace socdiff {

/// Derive an independent stream seed from a master seed and a stream index.
/// splitmix64 mixing keeps nearby (seed, index) pairs statistically unrelated.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Deterministic random stream. Normal variates use Box-Muller over
/// mt19937_64 output so sequences are identical across standard libraries;
/// std::normal_distribution is implementation-defined and would not be.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  Scalar uniform() {
    return static_cast<Scalar>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform in [lo, hi).
  Scalar uniform(Scalar lo, Scalar hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n) {
    // Rejection-free modulo is biased for huge n; n here is always tiny
    // relative to 2^64 so the bias is far below statistical resolution.
    return engine_() % n;
  }

  /// Standard normal variate.
  Scalar normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    const Scalar u1 = 1.0 - uniform();  // (0, 1]
    const Scalar u2 = uniform();
    const Scalar r = std::sqrt(-2.0 * std::log(u1));
    const Scalar a = 2.0 * M_PI * u2;
    cached_ = r * std::sin(a);
    has_cached_ = true;
    return r * std::cos(a);
  }

  /// Fill a matrix with iid standard normals in row-major order.
  void fill_normal(Eigen::Ref<Mat> m) {
    for (Index i = 0; i < m.rows(); ++i)
      for (Index j = 0; j < m.cols(); ++j) m(i, j) = normal();
  }

  Mat normal_matrix(Index rows, Index cols) {
    Mat m(rows, cols);
    fill_normal(m);
    return m;
  }

 private:
  std::mt19937_64 engine_;
  Scalar cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace socdiff
