// Copyright (c) 2026 sparse-denoise contributors.
// SPDX-License-Identifier: Apache-2.0

#ifndef SPARSE_DENOISE_DICTIONARY_HPP
#define SPARSE_DENOISE_DICTIONARY_HPP

#include <Eigen/Core>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace sparse_denoise {

using Eigen::Index;

template <typename Scalar>
using VecX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Column norm tolerance for dictionary atoms.
inline constexpr double kAtomNormTolerance = 1e-8;

/// An n x K matrix of unit-norm atoms. Sparse linear combinations of its
/// columns approximate length-n signals.
template <typename Scalar>
struct Dictionary {
  MatX<Scalar> atoms;

  Index signal_dim() const { return atoms.rows(); }
  Index atom_count() const { return atoms.cols(); }
  auto atom(Index j) const { return atoms.col(j); }

  /// Checks the type invariants: finite entries, nonempty, unit-norm columns.
  void validate() const {
    if (atoms.rows() < 1 || atoms.cols() < 1)
      throw std::invalid_argument("dictionary must have at least one row and one atom");
    if (!atoms.allFinite())
      throw std::invalid_argument("dictionary contains non-finite entries");
    for (Index j = 0; j < atoms.cols(); ++j) {
      const double norm = static_cast<double>(atoms.col(j).norm());
      if (std::abs(norm - 1.0) > kAtomNormTolerance) {
        std::ostringstream msg;
        msg << "dictionary atom " << j << " has norm " << norm << ", expected 1";
        throw std::invalid_argument(msg.str());
      }
    }
  }

  /// Builds a validated dictionary from an atom matrix.
  static Dictionary from_atoms(MatX<Scalar> m) {
    Dictionary d{std::move(m)};
    d.validate();
    return d;
  }

  /// Normalizes every column to unit norm, then validates. Zero columns are
  /// rejected.
  static Dictionary from_unnormalized(MatX<Scalar> m) {
    for (Index j = 0; j < m.cols(); ++j) {
      const Scalar norm = m.col(j).norm();
      if (!(norm > Scalar(0)))
        throw std::invalid_argument("cannot normalize a zero dictionary column");
      m.col(j) /= norm;
    }
    return from_atoms(std::move(m));
  }
};

/// Writes a dictionary as CSV: header line "n,K" followed by n rows of K
/// comma-separated entries (row-major).
template <typename Scalar>
void save_dictionary_csv(const Dictionary<Scalar>& dict, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.precision(17);
  out << dict.signal_dim() << "," << dict.atom_count() << "\n";
  for (Index i = 0; i < dict.signal_dim(); ++i) {
    for (Index j = 0; j < dict.atom_count(); ++j) {
      if (j) out << ",";
      out << dict.atoms(i, j);
    }
    out << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

template <typename Scalar>
Dictionary<Scalar> load_dictionary_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty dictionary file: " + path);
  Index n = 0, k = 0;
  {
    std::istringstream header(line);
    char comma = 0;
    if (!(header >> n >> comma >> k) || comma != ',' || n < 1 || k < 1)
      throw std::runtime_error("bad dictionary header (expected \"n,K\"): " + path);
  }
  MatX<Scalar> m(n, k);
  for (Index i = 0; i < n; ++i) {
    if (!std::getline(in, line))
      throw std::runtime_error("truncated dictionary file: " + path);
    std::istringstream row(line);
    std::string cell;
    for (Index j = 0; j < k; ++j) {
      if (!std::getline(row, cell, ','))
        throw std::runtime_error("short dictionary row: " + path);
      m(i, j) = static_cast<Scalar>(std::stod(cell));
    }
  }
  return Dictionary<Scalar>::from_atoms(std::move(m));
}

}  // namespace sparse_denoise

#endif  // SPARSE_DENOISE_DICTIONARY_HPP
