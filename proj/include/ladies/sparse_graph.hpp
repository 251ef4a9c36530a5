#pragma once

#include "ladies/types.hpp"

#include <span>
#include <utility>
#include <vector>

namespace ladies {

/// CSR adjacency of an undirected graph; the single structural source of
/// truth for every sampler.
///
/// Invariants:
///  - row_ptr is non-decreasing with row_ptr[num_nodes] == col_idx.size();
///  - column indices are strictly increasing within each row;
///  - (u,v) stored iff (v,u) stored;
///  - no self-loops (they are introduced later, by the Laplacian).
struct SparseGraph {
  Index num_nodes = 0;
  std::vector<Index> row_ptr;  // length num_nodes + 1
  std::vector<Index> col_idx;  // directed arc count: 2x undirected edges

  Index nnz() const { return static_cast<Index>(col_idx.size()); }
  Index num_edges() const { return nnz() / 2; }

  Index degree(Index u) const {
    return row_ptr[static_cast<size_t>(u) + 1] - row_ptr[static_cast<size_t>(u)];
  }

  std::span<const Index> neighbors(Index u) const {
    return {col_idx.data() + row_ptr[static_cast<size_t>(u)],
            static_cast<size_t>(degree(u))};
  }
};

/// Builds a canonical SparseGraph from an edge list. Duplicate edges and
/// self-loops are dropped, directed inputs are symmetrized, and the input
/// order never affects the output.
///
/// Throws std::invalid_argument naming the offending edge if an endpoint is
/// out of [0, num_nodes).
SparseGraph build_graph(const std::vector<std::pair<Index, Index>>& edges,
                        Index num_nodes);

/// Checks every SparseGraph invariant; throws std::invalid_argument on the
/// first violation.
void validate_graph(const SparseGraph& g);

/// Union of closed neighborhoods N(v) over the given nodes, v included in
/// N(v) because aggregation runs over A + I. Sorted and deduplicated.
std::vector<Index> neighbor_union(const SparseGraph& g,
                                  const std::vector<Index>& nodes);

}  // namespace ladies
