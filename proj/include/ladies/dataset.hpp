#pragma once

#include "ladies/rng.hpp"
#include "ladies/sparse_graph.hpp"
#include "ladies/types.hpp"

#include <string>
#include <vector>

namespace ladies {

/// Node-classification dataset: graph, dense features, one class id per
/// node, and three disjoint split index lists.
struct Dataset {
  SparseGraph graph;
  Matrix features;  // num_nodes x feature_dim
  std::vector<Index> labels;
  std::vector<Index> train_idx;
  std::vector<Index> val_idx;
  std::vector<Index> test_idx;

  Index num_classes() const;
};

/// Throws std::invalid_argument on any broken Dataset invariant (shape
/// mismatch, label range, split overlap or out-of-range split index).
void validate_dataset(const Dataset& d);

struct LoadOptions {
  // L1 row normalization of features, the usual citation-graph treatment.
  bool normalize_features = true;
};

/// Loads the four-file plain-text directory format:
///   graph.txt    "n m" header then m lines "u v"
///   features.txt "n d" header then n whitespace-separated rows
///   labels.txt   n lines, one class id each
///   splits.txt   3 lines: space-separated train / val / test indices
/// Errors name the offending file and line.
Dataset load_dataset(const std::string& dir, const LoadOptions& opts = {});

/// Writes the same format back, canonically: each undirected edge once with
/// u < v, sorted; floats printed with %.17g. save(load(dir)) is
/// byte-identical for canonical fixtures loaded with normalization off.
void save_dataset(const Dataset& d, const std::string& dir);

/// L1 row normalization; all-zero rows pass through.
Matrix l1_normalize_rows(const Matrix& features);

struct SyntheticSpec {
  enum class Kind { kErdosRenyi, kSbm, kStar, kPath, kGrid };
  enum class Features { kOneHot, kGaussian };

  Kind kind = Kind::kErdosRenyi;
  Index num_nodes = 0;  // star: leaves + 1; grid: rows * cols wins
  Index grid_rows = 0;
  Index grid_cols = 0;
  double er_p = 0.0;
  int sbm_blocks = 2;
  double sbm_p_in = 0.0;
  double sbm_p_out = 0.0;

  Features features = Features::kOneHot;
  Index feature_dim = 0;        // Gaussian only; defaults to max(classes, 8)
  double feature_noise = 0.5;   // Gaussian spread around the class mean
  int classes = 2;              // label = node % classes unless SBM blocks
  std::uint64_t seed = 0;       // recorded; the rng argument drives draws
};

/// Deterministic synthetic dataset. SBM labels are the block ids; other
/// generators label node i with i mod classes. Splits are a shuffled
/// 60/20/20 partition.
Dataset generate(const SyntheticSpec& spec, Rng& rng);

struct DegreeStats {
  double average_degree = 0.0;
  Index max_degree = 0;
};

DegreeStats degree_stats(const SparseGraph& g);

/// Exact E|union of closed neighborhoods| over uniform without-replacement
/// batches of size b: sum_j (1 - C(n - dj, b) / C(n, b)) with dj the closed
/// neighborhood size of node j.
double average_candidate_size(const SparseGraph& g, Index b);

/// Monte-Carlo estimate of the same quantity, averaging |neighbor_union|
/// over sampled batches.
double estimate_candidate_size(const SparseGraph& g, Index b, long trials,
                               Rng& rng);

/// Averaged candidate-size curve for b = 1..max_b via nested prefixes of
/// random permutations; monotone non-decreasing by construction.
std::vector<double> candidate_size_curve(const SparseGraph& g, Index max_b,
                                         long trials, Rng& rng);

}  // namespace ladies
