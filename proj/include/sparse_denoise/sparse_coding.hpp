// Copyright (c) 2026 sparse-denoise contributors.
// SPDX-License-Identifier: Apache-2.0
//
// Per-signal sparse approximation solvers over a fixed dictionary:
//
//   * pdas_encode  — best-subset coder that alternates restricted least
//                    squares on an active set with a re-selection of the
//                    set by largest per-coordinate sacrifice, until the
//                    set reaches a fixed point of the KKT conditions.
//   * omp_encode   — orthogonal matching pursuit with full refits.
//   * lasso_encode — l1-penalized least squares via cyclic coordinate
//                    descent with soft thresholding.
//   * brute_force_best_subset — exhaustive reference coder for testing.
//
// All solvers are pure functions of their inputs and safe to call
// concurrently over distinct signals. Atom indices are 0-based.

#ifndef SPARSE_DENOISE_SPARSE_CODING_HPP
#define SPARSE_DENOISE_SPARSE_CODING_HPP

#include <Eigen/Cholesky>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "sparse_denoise/dictionary.hpp"
#include "sparse_denoise/rng.hpp"
#include "sparse_denoise/sparse_code.hpp"

namespace sparse_denoise {

namespace detail {

template <typename Scalar>
void check_signal(const Eigen::Ref<const VecX<Scalar>>& y, const Dictionary<Scalar>& dict) {
  if (y.size() != dict.signal_dim())
    throw std::invalid_argument("signal length does not match dictionary rows");
  if (!y.allFinite()) throw std::invalid_argument("signal contains non-finite entries");
}

/// Solves G_AA z = b_A by LDLT, falling back to a ridge-regularized system
/// when the restricted Gram matrix is singular within tolerance.
template <typename Scalar>
VecX<Scalar> solve_restricted_normal_equations(const MatX<Scalar>& gram_sub,
                                               const VecX<Scalar>& rhs, Scalar ridge_epsilon) {
  Eigen::LDLT<MatX<Scalar>> ldlt(gram_sub);
  VecX<Scalar> z = ldlt.solve(rhs);
  const auto d = ldlt.vectorD();
  const Scalar dmax = d.maxCoeff();
  const bool degenerate =
      !(d.minCoeff() > dmax * Scalar(1e-12)) || !z.allFinite();
  if (degenerate) {
    MatX<Scalar> ridged = gram_sub;
    ridged.diagonal().array() += ridge_epsilon;
    z = ridged.ldlt().solve(rhs);
  }
  return z;
}

/// Gathers the restricted Gram submatrix and right-hand side for a support.
template <typename Scalar>
void gather_restricted(const MatX<Scalar>& gram, const VecX<Scalar>& correlations,
                       std::span<const Index> support, MatX<Scalar>& gram_sub,
                       VecX<Scalar>& rhs) {
  const Index m = static_cast<Index>(support.size());
  gram_sub.resize(m, m);
  rhs.resize(m);
  for (Index s = 0; s < m; ++s) {
    rhs[s] = correlations[support[static_cast<std::size_t>(s)]];
    for (Index t = 0; t < m; ++t)
      gram_sub(s, t) = gram(support[static_cast<std::size_t>(s)], support[static_cast<std::size_t>(t)]);
  }
}

/// Indices of the `count` largest values of v, ties broken by lowest index,
/// returned in ascending index order.
template <typename Scalar>
std::vector<Index> top_indices(const VecX<Scalar>& v, Index count, std::vector<Index>& scratch) {
  scratch.resize(static_cast<std::size_t>(v.size()));
  std::iota(scratch.begin(), scratch.end(), Index{0});
  std::partial_sort(scratch.begin(), scratch.begin() + count, scratch.end(),
                    [&v](Index a, Index b) { return v[a] > v[b] || (v[a] == v[b] && a < b); });
  std::vector<Index> out(scratch.begin(), scratch.begin() + count);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace detail

/// Squared reconstruction error ||y - D x||^2.
template <typename Scalar>
Scalar objective(const Eigen::Ref<const VecX<Scalar>>& y, const Dictionary<Scalar>& dict,
                 const SparseCode<Scalar>& code) {
  detail::check_signal<Scalar>(y, dict);
  if (code.length != dict.atom_count())
    throw std::invalid_argument("code length does not match dictionary atom count");
  VecX<Scalar> r = y;
  for (std::size_t i = 0; i < code.support.size(); ++i)
    r -= dict.atoms.col(code.support[i]) * code.values[static_cast<Index>(i)];
  return r.squaredNorm();
}

/// Dual variable g_j = (y - D x)' d_j for every atom.
template <typename Scalar>
VecX<Scalar> compute_dual(const Eigen::Ref<const VecX<Scalar>>& y, const Dictionary<Scalar>& dict,
                          const SparseCode<Scalar>& code) {
  detail::check_signal<Scalar>(y, dict);
  if (code.length != dict.atom_count())
    throw std::invalid_argument("code length does not match dictionary atom count");
  VecX<Scalar> r = y;
  for (std::size_t i = 0; i < code.support.size(); ++i)
    r -= dict.atoms.col(code.support[i]) * code.values[static_cast<Index>(i)];
  return dict.atoms.transpose() * r;
}

/// Sacrifice h_j = (x_j + g_j)^2 / 2: the loss increase from forcing
/// coordinate j to zero while all others stay at their current values.
template <typename Scalar>
VecX<Scalar> sacrifice(const SparseCode<Scalar>& code, const VecX<Scalar>& dual) {
  if (dual.size() != code.length)
    throw std::invalid_argument("dual length does not match code length");
  VecX<Scalar> h = dual;
  for (std::size_t i = 0; i < code.support.size(); ++i)
    h[code.support[i]] += code.values[static_cast<Index>(i)];
  return Scalar(0.5) * h.array().square();
}

/// argmin_z ||y - D_A z||^2 on the support A. When the restricted Gram matrix
/// is singular within tolerance the ridge solution
/// (D_A' D_A + eps I)^{-1} D_A' y is returned instead.
template <typename Scalar>
VecX<Scalar> restricted_least_squares(const Eigen::Ref<const VecX<Scalar>>& y,
                                      const Dictionary<Scalar>& dict,
                                      std::span<const Index> support,
                                      Scalar ridge_epsilon = Scalar(1e-8)) {
  detail::check_signal<Scalar>(y, dict);
  const Index m = static_cast<Index>(support.size());
  if (m == 0) throw std::invalid_argument("restricted least squares needs a nonempty support");
  if (m > dict.signal_dim())
    throw std::invalid_argument("support larger than signal dimension");
  for (Index j : support)
    if (j < 0 || j >= dict.atom_count())
      throw std::invalid_argument("support index out of range");

  MatX<Scalar> sub(dict.signal_dim(), m);
  for (Index s = 0; s < m; ++s) sub.col(s) = dict.atoms.col(support[static_cast<std::size_t>(s)]);
  const MatX<Scalar> gram_sub = sub.transpose() * sub;
  const VecX<Scalar> rhs = sub.transpose() * y;
  return detail::solve_restricted_normal_equations(gram_sub, rhs, ridge_epsilon);
}

/// Best-subset coder. Starting from a seeded random active set of size T0,
/// each pass solves least squares on the set, evaluates duals on the
/// complement, and re-selects the T0 coordinates of largest sacrifice
/// (h = x^2/2 on the set, g^2/2 off it); it stops when the set repeats.
///
/// On convergence the result is the fixed point and satisfies the
/// best-subset KKT conditions. If the iteration cap is reached instead, the
/// iterate with the lowest objective seen is returned with converged=false.
/// The precomputed `gram` must equal dict.atoms' * dict.atoms.
template <typename Scalar>
PdasResult<Scalar> pdas_encode_with_gram(const Eigen::Ref<const VecX<Scalar>>& y,
                                         const Dictionary<Scalar>& dict,
                                         const MatX<Scalar>& gram, const PdasConfig& cfg) {
  const Index n = dict.signal_dim();
  const Index atom_count = dict.atom_count();
  cfg.validate(n, atom_count);
  detail::check_signal<Scalar>(y, dict);

  const Index t0 = cfg.sparsity;
  Rng rng(cfg.seed);
  std::vector<Index> active;
  {
    const auto init = rng.subset(atom_count, t0);
    active.assign(init.begin(), init.end());
  }

  const VecX<Scalar> correlations = dict.atoms.transpose() * y;

  MatX<Scalar> gram_sub;
  VecX<Scalar> rhs, coeffs, residual, dual(atom_count), h(atom_count);
  std::vector<Index> scratch;

  PdasResult<Scalar> best;
  Scalar best_objective = std::numeric_limits<Scalar>::infinity();
  bool converged = false;
  int iterations = 0;

  for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
    iterations = iter;

    detail::gather_restricted(gram, correlations, active, gram_sub, rhs);
    coeffs = detail::solve_restricted_normal_equations(gram_sub, rhs,
                                                       static_cast<Scalar>(cfg.ridge_epsilon));

    residual = y;
    for (std::size_t i = 0; i < active.size(); ++i)
      residual -= dict.atoms.col(active[i]) * coeffs[static_cast<Index>(i)];
    const Scalar obj = residual.squaredNorm();

    dual = correlations;
    for (std::size_t i = 0; i < active.size(); ++i)
      dual -= gram.col(active[i]) * coeffs[static_cast<Index>(i)];

    // sacrifice in split form: x^2/2 on the active set, g^2/2 off it
    for (Index j = 0; j < atom_count; ++j) h[j] = Scalar(0.5) * dual[j] * dual[j];
    for (std::size_t i = 0; i < active.size(); ++i) {
      const Scalar v = coeffs[static_cast<Index>(i)];
      h[active[i]] = Scalar(0.5) * v * v;
    }

    if (obj < best_objective) {
      best_objective = obj;
      best.code.support = active;
      best.code.values = coeffs;
      best.code.length = atom_count;
      best.dual.g = dual;
      best.dual.h = h;
    }

    std::vector<Index> next = detail::top_indices(h, t0, scratch);
    if (next == active) {
      converged = true;
      best.code.support = active;
      best.code.values = coeffs;
      best.code.length = atom_count;
      best.dual.g = dual;
      best.dual.h = h;
      break;
    }
    active = std::move(next);
  }

  best.converged = converged;
  best.iterations = iterations;
  return best;
}

template <typename Scalar>
PdasResult<Scalar> pdas_encode(const Eigen::Ref<const VecX<Scalar>>& y,
                               const Dictionary<Scalar>& dict, const PdasConfig& cfg) {
  const MatX<Scalar> gram = dict.atoms.transpose() * dict.atoms;
  return pdas_encode_with_gram<Scalar>(y, dict, gram, cfg);
}

/// Greedy pursuit: repeatedly selects the unselected atom most correlated
/// with the residual (ties to the lowest index) and refits all selected
/// coefficients by least squares, which keeps the residual orthogonal to the
/// selected atoms. Stops after T0 atoms, when the residual correlation is
/// exactly zero, or when the optional residual threshold is met.
template <typename Scalar>
OmpResult<Scalar> omp_encode_with_gram(const Eigen::Ref<const VecX<Scalar>>& y,
                                       const Dictionary<Scalar>& dict, const MatX<Scalar>& gram,
                                       const OmpConfig& cfg) {
  const Index atom_count = dict.atom_count();
  cfg.validate(dict.signal_dim(), atom_count);
  detail::check_signal<Scalar>(y, dict);

  OmpResult<Scalar> result;
  result.code.length = atom_count;

  const VecX<Scalar> correlations = dict.atoms.transpose() * y;
  VecX<Scalar> dual = correlations;
  std::vector<char> selected_mask(static_cast<std::size_t>(atom_count));
  std::vector<Index> selected;
  MatX<Scalar> gram_sub;
  VecX<Scalar> rhs, coeffs, residual;

  if (cfg.residual_threshold && y.squaredNorm() <= *cfg.residual_threshold) return result;

  for (Index step = 0; step < cfg.sparsity; ++step) {
    Index pick = -1;
    Scalar pick_abs = Scalar(-1);
    for (Index j = 0; j < atom_count; ++j) {
      if (selected_mask[static_cast<std::size_t>(j)]) continue;
      const Scalar a = std::abs(dual[j]);
      if (a > pick_abs) {
        pick_abs = a;
        pick = j;
      }
    }
    if (pick < 0 || pick_abs == Scalar(0)) break;  // residual orthogonal to the rest

    selected_mask[static_cast<std::size_t>(pick)] = 1;
    selected.insert(std::upper_bound(selected.begin(), selected.end(), pick), pick);
    result.iterations = static_cast<int>(step) + 1;

    detail::gather_restricted(gram, correlations, selected, gram_sub, rhs);
    coeffs = detail::solve_restricted_normal_equations(gram_sub, rhs, Scalar(1e-8));

    dual = correlations;
    for (std::size_t i = 0; i < selected.size(); ++i)
      dual -= gram.col(selected[i]) * coeffs[static_cast<Index>(i)];

    if (cfg.residual_threshold) {
      residual = y;
      for (std::size_t i = 0; i < selected.size(); ++i)
        residual -= dict.atoms.col(selected[i]) * coeffs[static_cast<Index>(i)];
      if (residual.squaredNorm() <= *cfg.residual_threshold) break;
    }
  }

  result.code.support = std::move(selected);
  result.code.values = std::move(coeffs);
  if (result.code.values.size() != static_cast<Index>(result.code.support.size()))
    result.code.values = VecX<Scalar>::Zero(static_cast<Index>(result.code.support.size()));
  return result;
}

template <typename Scalar>
OmpResult<Scalar> omp_encode(const Eigen::Ref<const VecX<Scalar>>& y,
                             const Dictionary<Scalar>& dict, const OmpConfig& cfg) {
  const MatX<Scalar> gram = dict.atoms.transpose() * dict.atoms;
  return omp_encode_with_gram<Scalar>(y, dict, gram, cfg);
}

template <typename Scalar>
Scalar soft_threshold(Scalar z, Scalar t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return Scalar(0);
}

/// Minimizes ||y - D x||^2 + lambda ||x||_1 by cyclic coordinate descent.
/// Each coordinate update is the exact scalar minimizer (unit-norm atoms):
/// x_j <- soft(x_j + d_j' r, lambda / 2). Sweeps stop when the largest
/// coefficient change falls below cfg.tolerance.
template <typename Scalar>
LassoResult<Scalar> lasso_encode(const Eigen::Ref<const VecX<Scalar>>& y,
                                 const Dictionary<Scalar>& dict, const LassoConfig& cfg) {
  cfg.validate();
  detail::check_signal<Scalar>(y, dict);
  const Index atom_count = dict.atom_count();
  const Scalar threshold = static_cast<Scalar>(cfg.lambda) / Scalar(2);

  VecX<Scalar> x = VecX<Scalar>::Zero(atom_count);
  VecX<Scalar> residual = y;

  LassoResult<Scalar> result;
  for (int sweep = 1; sweep <= cfg.max_sweeps; ++sweep) {
    result.sweeps = sweep;
    Scalar max_delta = Scalar(0);
    for (Index j = 0; j < atom_count; ++j) {
      const Scalar old = x[j];
      const Scalar z = old + dict.atoms.col(j).dot(residual);
      const Scalar updated = soft_threshold(z, threshold);
      if (updated != old) {
        residual += dict.atoms.col(j) * (old - updated);
        x[j] = updated;
        max_delta = std::max(max_delta, std::abs(updated - old));
      }
    }
    if (max_delta < static_cast<Scalar>(cfg.tolerance)) {
      result.converged = true;
      break;
    }
  }

  std::vector<Index> support;
  for (Index j = 0; j < atom_count; ++j)
    if (x[j] != Scalar(0)) support.push_back(j);
  VecX<Scalar> values(static_cast<Index>(support.size()));
  for (std::size_t i = 0; i < support.size(); ++i) values[static_cast<Index>(i)] = x[support[i]];
  result.code.support = std::move(support);
  result.code.values = std::move(values);
  result.code.length = atom_count;
  return result;
}

/// Largest violation of the l1 subgradient optimality conditions at `code`:
/// |2 d_j'(y - Dx)| <= lambda off the support, = lambda * sign(x_j) on it.
template <typename Scalar>
Scalar lasso_kkt_violation(const Eigen::Ref<const VecX<Scalar>>& y, const Dictionary<Scalar>& dict,
                           const SparseCode<Scalar>& code, Scalar lambda) {
  const VecX<Scalar> dual = compute_dual<Scalar>(y, dict, code);
  VecX<Scalar> x = code.to_dense();
  Scalar worst = Scalar(0);
  for (Index j = 0; j < code.length; ++j) {
    const Scalar corr2 = Scalar(2) * dual[j];
    if (x[j] == Scalar(0))
      worst = std::max(worst, std::abs(corr2) - lambda);
    else
      worst = std::max(worst, std::abs(corr2 - lambda * (x[j] > Scalar(0) ? Scalar(1) : Scalar(-1))));
  }
  return worst;
}

inline double binomial_count(Index n, Index k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double c = 1.0;
  for (Index i = 0; i < k; ++i) {
    c *= static_cast<double>(n - i) / static_cast<double>(i + 1);
    if (c > 1e15) return c;  // saturate; caller only compares against a cap
  }
  return c;
}

/// Exhaustive best-subset reference: enumerates every support of size
/// 1..T0 (lexicographically, smaller sizes first), solves least squares on
/// each by SVD, and returns the first global minimizer found. Guarded by
/// C(K, T0) <= 1e6.
template <typename Scalar>
SparseCode<Scalar> brute_force_best_subset(const Eigen::Ref<const VecX<Scalar>>& y,
                                           const Dictionary<Scalar>& dict, Index sparsity) {
  detail::check_signal<Scalar>(y, dict);
  const Index atom_count = dict.atom_count();
  if (sparsity < 1 || sparsity > atom_count)
    throw std::invalid_argument("sparsity must be in [1, K]");
  if (binomial_count(atom_count, sparsity) > 1e6)
    throw std::invalid_argument("support enumeration too large (C(K, T0) > 1e6)");

  SparseCode<Scalar> best;
  best.length = atom_count;
  Scalar best_objective = y.squaredNorm();  // empty support

  std::vector<Index> support;
  MatX<Scalar> sub;
  for (Index size = 1; size <= sparsity; ++size) {
    support.resize(static_cast<std::size_t>(size));
    std::iota(support.begin(), support.end(), Index{0});
    while (true) {
      sub.resize(dict.signal_dim(), size);
      for (Index s = 0; s < size; ++s) sub.col(s) = dict.atoms.col(support[static_cast<std::size_t>(s)]);
      Eigen::JacobiSVD<MatX<Scalar>> svd(sub, Eigen::ComputeThinU | Eigen::ComputeThinV);
      const VecX<Scalar> coeffs = svd.solve(y);
      const Scalar obj = (y - sub * coeffs).squaredNorm();
      if (obj < best_objective) {
        best_objective = obj;
        best.support = support;
        best.values = coeffs;
      }
      // next combination in lexicographic order
      Index pos = size - 1;
      while (pos >= 0 && support[static_cast<std::size_t>(pos)] == atom_count - size + pos) --pos;
      if (pos < 0) break;
      ++support[static_cast<std::size_t>(pos)];
      for (Index q = pos + 1; q < size; ++q)
        support[static_cast<std::size_t>(q)] = support[static_cast<std::size_t>(q - 1)] + 1;
    }
  }
  return best;
}

/// Recomputed fixed-point diagnostics for a best-subset code: duals from
/// scratch, sacrifices in split form, and the quantities the KKT conditions
/// compare. Empty-support codes are rejected.
template <typename Scalar>
struct KktReport {
  Scalar min_active_sacrifice;
  Scalar max_inactive_sacrifice;
  Scalar max_active_dual_abs;
};

template <typename Scalar>
KktReport<Scalar> kkt_report(const Eigen::Ref<const VecX<Scalar>>& y,
                             const Dictionary<Scalar>& dict, const SparseCode<Scalar>& code) {
  if (code.support.empty()) throw std::invalid_argument("kkt report needs a nonempty support");
  const VecX<Scalar> dual = compute_dual<Scalar>(y, dict, code);
  std::vector<char> active(static_cast<std::size_t>(code.length));
  for (Index j : code.support) active[static_cast<std::size_t>(j)] = 1;

  KktReport<Scalar> report{std::numeric_limits<Scalar>::infinity(), Scalar(0), Scalar(0)};
  for (std::size_t i = 0; i < code.support.size(); ++i) {
    const Scalar v = code.values[static_cast<Index>(i)];
    report.min_active_sacrifice = std::min(report.min_active_sacrifice, Scalar(0.5) * v * v);
    report.max_active_dual_abs = std::max(report.max_active_dual_abs, std::abs(dual[code.support[i]]));
  }
  for (Index j = 0; j < code.length; ++j)
    if (!active[static_cast<std::size_t>(j)])
      report.max_inactive_sacrifice =
          std::max(report.max_inactive_sacrifice, Scalar(0.5) * dual[j] * dual[j]);
  return report;
}

}  // namespace sparse_denoise

#endif  // SPARSE_DENOISE_SPARSE_CODING_HPP
