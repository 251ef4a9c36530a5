#pragma once

#include "ladies/sparse_graph.hpp"
#include "ladies/types.hpp"

namespace ladies {

/// Normalized graph Laplacian P = D^(-1/2) (A + I) D^(-1/2), stored CSR,
/// with the per-column squared norms cached at construction. The column
/// norms drive the degree-based sampling probabilities and caching them
/// once avoids per-batch quadratic work.
struct Laplacian {
  SparseRowMatrix matrix;  // P, num_nodes x num_nodes, symmetric
  Vector col_sq_norms;     // col_sq_norms[j] = sum_i P(i,j)^2
  Scalar frob_sq = 0.0;    // ||P||_F^2

  Index num_nodes() const { return static_cast<Index>(matrix.rows()); }
};

/// P = D^(-1/2) (A + I) D^(-1/2) with D the diagonal degree matrix of A + I.
/// Every row carries a nonzero diagonal entry, so no row of P is empty.
Laplacian normalized_laplacian(const SparseGraph& g);

/// QP: the |q| x num_nodes submatrix whose k-th row is row q[k] of P.
/// Duplicate indices in q duplicate rows. Throws on out-of-range indices.
SparseRowMatrix select_rows(const Laplacian& p, const RowSelection& q);

/// Squared L2 norm of every column of a CSR matrix (length = full column
/// count; zero where no stored entry touches the column).
Vector column_sq_norms(const SparseRowMatrix& sub);

/// P * h via the CSR structure; h has num_nodes rows.
Matrix multiply(const Laplacian& p, const Matrix& h);

}  // namespace ladies
