#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cstdint>
#include <vector>

namespace ladies {

// Node and column indices. Desk-scale graphs fit comfortably in 32 bits;
// keeping the sparse storage index small halves CSR memory.
using Index = std::int32_t;

// All floating arithmetic is carried out in 64-bit reals.
using Scalar = double;

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// CSR layout (row-major compressed sparse).
using SparseRowMatrix = Eigen::SparseMatrix<Scalar, Eigen::RowMajor, Index>;

/// Ordered list of node indices selecting rows of a matrix.
/// Duplicates are permitted (a duplicated index selects the row twice).
struct RowSelection {
  std::vector<Index> selected;

  RowSelection() = default;
  explicit RowSelection(std::vector<Index> idx) : selected(std::move(idx)) {}

  Index size() const { return static_cast<Index>(selected.size()); }
  bool empty() const { return selected.empty(); }
  Index operator[](Index k) const { return selected[static_cast<size_t>(k)]; }

  /// Selection of all rows 0..n-1 in order.
  static RowSelection all(Index n) {
    std::vector<Index> idx(static_cast<size_t>(n));
    for (Index i = 0; i < n; ++i) idx[static_cast<size_t>(i)] = i;
    return RowSelection(std::move(idx));
  }
};

}  // namespace ladies
