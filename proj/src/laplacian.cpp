#include "ladies/laplacian.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace ladies {

Laplacian normalized_laplacian(const SparseGraph& g) {
  const Index n = g.num_nodes;

  // Degrees in A + I; the self-loop guarantees d >= 1.
  std::vector<Scalar> inv_sqrt_deg(static_cast<size_t>(n));
  for (Index u = 0; u < n; ++u) {
    inv_sqrt_deg[static_cast<size_t>(u)] =
        1.0 / std::sqrt(static_cast<Scalar>(g.degree(u) + 1));
  }

  Laplacian p;
  p.matrix.resize(n, n);

  std::vector<Eigen::Triplet<Scalar, Index>> triplets;
  triplets.reserve(static_cast<size_t>(g.nnz()) + static_cast<size_t>(n));
  for (Index u = 0; u < n; ++u) {
    const Scalar du = inv_sqrt_deg[static_cast<size_t>(u)];
    // Diagonal from the added self-loop.
    triplets.emplace_back(u, u, du * du);
    for (Index v : g.neighbors(u)) {
      // Symmetric product of the two scaling factors; P(u,v) and P(v,u)
      // are computed from the same expression and compare bitwise equal.
      triplets.emplace_back(u, v, du * inv_sqrt_deg[static_cast<size_t>(v)]);
    }
  }
  p.matrix.setFromTriplets(triplets.begin(), triplets.end());
  p.matrix.makeCompressed();

  p.col_sq_norms = Vector::Zero(n);
  for (Index row = 0; row < n; ++row) {
    for (SparseRowMatrix::InnerIterator it(p.matrix, row); it; ++it) {
      p.col_sq_norms[it.col()] += it.value() * it.value();
    }
  }
  p.frob_sq = p.col_sq_norms.sum();
  return p;
}

SparseRowMatrix select_rows(const Laplacian& p, const RowSelection& q) {
  const Index n = p.num_nodes();
  SparseRowMatrix sub(q.size(), n);

  Eigen::VectorXi row_sizes(q.size());
  for (Index k = 0; k < q.size(); ++k) {
    const Index r = q[k];
    if (r < 0 || r >= n) {
      throw std::out_of_range("select_rows: row index " + std::to_string(r) +
                              " outside [0, " + std::to_string(n) + ")");
    }
    row_sizes[k] = static_cast<int>(p.matrix.outerIndexPtr()[r + 1] -
                                    p.matrix.outerIndexPtr()[r]);
  }
  sub.reserve(row_sizes);
  for (Index k = 0; k < q.size(); ++k) {
    for (SparseRowMatrix::InnerIterator it(p.matrix, q[k]); it; ++it) {
      sub.insert(k, it.col()) = it.value();
    }
  }
  sub.makeCompressed();
  return sub;
}

Vector column_sq_norms(const SparseRowMatrix& sub) {
  Vector out = Vector::Zero(sub.cols());
  for (Index row = 0; row < sub.outerSize(); ++row) {
    for (SparseRowMatrix::InnerIterator it(sub, row); it; ++it) {
      out[it.col()] += it.value() * it.value();
    }
  }
  return out;
}

Matrix multiply(const Laplacian& p, const Matrix& h) {
  if (h.rows() != p.matrix.cols()) {
    throw std::invalid_argument("multiply: P is " +
                                std::to_string(p.matrix.rows()) + "x" +
                                std::to_string(p.matrix.cols()) + " but h has " +
                                std::to_string(h.rows()) + " rows");
  }
  return p.matrix * h;
}

}  // namespace ladies
