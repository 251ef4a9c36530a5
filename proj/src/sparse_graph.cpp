#include "ladies/sparse_graph.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace ladies {

SparseGraph build_graph(const std::vector<std::pair<Index, Index>>& edges,
                        Index num_nodes) {
  if (num_nodes < 0) {
    throw std::invalid_argument("build_graph: negative node count");
  }
  for (const auto& [u, v] : edges) {
    if (u < 0 || u >= num_nodes || v < 0 || v >= num_nodes) {
      throw std::invalid_argument("build_graph: edge (" + std::to_string(u) +
                                  ", " + std::to_string(v) +
                                  ") has an endpoint outside [0, " +
                                  std::to_string(num_nodes) + ")");
    }
  }

  // Symmetrize, drop self-loops, sort, dedup.
  std::vector<std::pair<Index, Index>> arcs;
  arcs.reserve(edges.size() * 2);
  for (const auto& [u, v] : edges) {
    if (u == v) continue;
    arcs.emplace_back(u, v);
    arcs.emplace_back(v, u);
  }
  std::sort(arcs.begin(), arcs.end());
  arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());

  SparseGraph g;
  g.num_nodes = num_nodes;
  g.row_ptr.assign(static_cast<size_t>(num_nodes) + 1, 0);
  g.col_idx.reserve(arcs.size());
  for (const auto& [u, v] : arcs) {
    ++g.row_ptr[static_cast<size_t>(u) + 1];
    g.col_idx.push_back(v);
  }
  for (size_t i = 1; i < g.row_ptr.size(); ++i) {
    g.row_ptr[i] += g.row_ptr[i - 1];
  }
  return g;
}

void validate_graph(const SparseGraph& g) {
  if (g.num_nodes < 0) {
    throw std::invalid_argument("graph: negative node count");
  }
  if (g.row_ptr.size() != static_cast<size_t>(g.num_nodes) + 1) {
    throw std::invalid_argument("graph: row_ptr length mismatch");
  }
  if (!g.row_ptr.empty() &&
      (g.row_ptr.front() != 0 ||
       g.row_ptr.back() != static_cast<Index>(g.col_idx.size()))) {
    throw std::invalid_argument("graph: row_ptr endpoints mismatch");
  }
  for (Index u = 0; u < g.num_nodes; ++u) {
    const Index begin = g.row_ptr[static_cast<size_t>(u)];
    const Index end = g.row_ptr[static_cast<size_t>(u) + 1];
    if (end < begin) {
      throw std::invalid_argument("graph: row_ptr not non-decreasing at row " +
                                  std::to_string(u));
    }
    for (Index k = begin; k < end; ++k) {
      const Index v = g.col_idx[static_cast<size_t>(k)];
      if (v < 0 || v >= g.num_nodes) {
        throw std::invalid_argument("graph: column index out of range in row " +
                                    std::to_string(u));
      }
      if (v == u) {
        throw std::invalid_argument("graph: self-loop stored at node " +
                                    std::to_string(u));
      }
      if (k > begin && g.col_idx[static_cast<size_t>(k) - 1] >= v) {
        throw std::invalid_argument(
            "graph: columns not strictly increasing in row " +
            std::to_string(u));
      }
      // Symmetry: (u,v) must have a matching (v,u).
      const auto nbrs = g.neighbors(v);
      if (!std::binary_search(nbrs.begin(), nbrs.end(), u)) {
        throw std::invalid_argument("graph: edge (" + std::to_string(u) + ", " +
                                    std::to_string(v) + ") lacks its mirror");
      }
    }
  }
}

std::vector<Index> neighbor_union(const SparseGraph& g,
                                  const std::vector<Index>& nodes) {
  std::vector<Index> out;
  for (Index v : nodes) {
    out.push_back(v);
    const auto nbrs = g.neighbors(v);
    out.insert(out.end(), nbrs.begin(), nbrs.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace ladies
