// Copyright (c) 2026 sparse-denoise contributors.
// SPDX-License-Identifier: Apache-2.0

#ifndef SPARSE_DENOISE_SPARSE_CODE_HPP
#define SPARSE_DENOISE_SPARSE_CODE_HPP

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "sparse_denoise/dictionary.hpp"

namespace sparse_denoise {

/// A K-length coefficient vector stored as (support, values). Entries off the
/// support are identically zero. Support indices are 0-based, distinct, and
/// kept in ascending order.
template <typename Scalar>
struct SparseCode {
  std::vector<Index> support;
  VecX<Scalar> values;
  Index length = 0;

  Index support_size() const { return static_cast<Index>(support.size()); }

  VecX<Scalar> to_dense() const {
    VecX<Scalar> x = VecX<Scalar>::Zero(length);
    for (std::size_t i = 0; i < support.size(); ++i) x[support[i]] = values[static_cast<Index>(i)];
    return x;
  }

  void validate() const {
    if (static_cast<Index>(support.size()) != values.size())
      throw std::invalid_argument("sparse code support/values size mismatch");
    Index prev = -1;
    for (Index j : support) {
      if (j < 0 || j >= length) throw std::invalid_argument("sparse code support index out of range");
      if (j <= prev) throw std::invalid_argument("sparse code support must be ascending and distinct");
      prev = j;
    }
  }
};

/// The coder's dual view: g holds residual correlations per atom, h the
/// per-coordinate sacrifice that ranks atoms for active-set selection.
template <typename Scalar>
struct DualState {
  VecX<Scalar> g;
  VecX<Scalar> h;
};

/// Configuration of the active-set best-subset coder.
struct PdasConfig {
  Index sparsity = 1;            // number of kept coefficients
  int max_iterations = 20;       // active-set refinement cap
  double ridge_epsilon = 1e-8;   // fallback regularization for degenerate LS
  std::uint64_t seed = 0;        // seeds the random initial active set

  void validate(Index signal_dim, Index atom_count) const {
    if (sparsity < 1 || sparsity > std::min(signal_dim, atom_count))
      throw std::invalid_argument("pdas sparsity must be in [1, min(n, K)]");
    if (max_iterations < 1) throw std::invalid_argument("pdas max_iterations must be >= 1");
    if (ridge_epsilon < 0) throw std::invalid_argument("pdas ridge_epsilon must be >= 0");
  }
};

struct OmpConfig {
  Index sparsity = 5;
  std::optional<double> residual_threshold;  // stop when ||r||^2 <= threshold

  void validate(Index signal_dim, Index atom_count) const {
    (void)signal_dim;
    if (sparsity < 1 || sparsity > atom_count)
      throw std::invalid_argument("omp sparsity must be in [1, K]");
    if (residual_threshold && *residual_threshold < 0)
      throw std::invalid_argument("omp residual_threshold must be >= 0");
  }
};

struct LassoConfig {
  double lambda = 0.0;      // l1 penalty weight
  double tolerance = 1e-7;  // sweep stop: max coefficient change
  int max_sweeps = 1000;

  void validate() const {
    if (lambda < 0) throw std::invalid_argument("lasso lambda must be >= 0");
    if (!(tolerance > 0)) throw std::invalid_argument("lasso tolerance must be > 0");
    if (max_sweeps < 1) throw std::invalid_argument("lasso max_sweeps must be >= 1");
  }
};

template <typename Scalar>
struct PdasResult {
  SparseCode<Scalar> code;
  DualState<Scalar> dual;
  int iterations = 0;
  bool converged = false;
};

template <typename Scalar>
struct OmpResult {
  SparseCode<Scalar> code;
  int iterations = 0;
};

template <typename Scalar>
struct LassoResult {
  SparseCode<Scalar> code;
  int sweeps = 0;
  bool converged = false;
};

}  // namespace sparse_denoise

#endif  // SPARSE_DENOISE_SPARSE_CODE_HPP
