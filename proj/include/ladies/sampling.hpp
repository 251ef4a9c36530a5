#pragma once

#include "ladies/laplacian.hpp"
#include "ladies/rng.hpp"
#include "ladies/sparse_graph.hpp"
#include "ladies/types.hpp"

namespace ladies {

enum class Replacement {
  kWith,     // i.i.d. draws; duplicates merge by summing sketch weights
  kWithout,  // distinct draws (ablation); exhaustive when s covers the support
};

/// Diagonal importance sketch S: support holds the distinct sampled nodes,
/// weights the accumulated 1/(s*p_i) mass (a node drawn twice contributes
/// twice). Over repeated draws E[S] equals the indicator of the support of
/// the generating law.
struct SketchDiag {
  std::vector<Index> support;   // sorted, distinct
  std::vector<Scalar> weights;  // aligned with support
};

/// One sampled layer. Rows of p_tilde follow upper_nodes, columns follow
/// lower_nodes, and p_tilde = Q^(l) P S^(l-1) Q^(l-1)^T, row-normalized when
/// `normalized` is set. `probs` is the layer's sampling law over all nodes
/// (empty for schemes without a per-layer law: full batch, neighbor).
struct LayerPlan {
  int layer_index = 0;  // l, with the output layer at l = L
  RowSelection upper_nodes;
  RowSelection lower_nodes;
  Matrix p_tilde;
  Vector probs;
  Index zero_rows = 0;  // all-zero rows of p_tilde (data, not an error)
  bool normalized = false;
};

/// Chained per-layer plans ordered l = L down to 1:
/// layers[k].lower_nodes == layers[k+1].upper_nodes, and input_nodes are the
/// bottom selection Q^0 feeding feature extraction.
struct BatchPlan {
  std::vector<LayerPlan> layers;
  RowSelection input_nodes;
  RowSelection batch_nodes;
};

/// Layer-dependent importance law p_i = ||(QP)_{*,i}||^2 / ||QP||_F^2 with Q
/// selecting `upper`. Zero exactly outside the closed neighbor union of the
/// upper nodes. Throws if ||QP||_F^2 == 0 (corrupted Laplacian).
Vector ladies_probs(const Laplacian& p, const RowSelection& upper);

/// Degree-based law q_j = ||P_{*,j}||^2 / ||P||_F^2, identical at every layer.
Vector fastgcn_probs(const Laplacian& p);

/// Draws s nodes from `probs` and folds them into a sketch.
/// kWith: s i.i.d. draws, weight c_i/(s*p_i).
/// kWithout with s >= |support|: the whole support with unit weights (the
///   exhaustive draw is the exact sum, so the weights degenerate to 1).
/// kWithout with s < |support|: s distinct draws by the law, weights still
///   1/(s*p_i); biased, kept for ablation.
SketchDiag draw_sketch(const Vector& probs, Index s, Rng& rng,
                       Replacement mode);

/// Q^(l) P S Q^(l-1)^T: dense |upper| x |sketch.support| block of P with
/// columns rescaled by the sketch weights. Counts all-zero rows if asked.
Matrix assemble_p_tilde(const Laplacian& p, const RowSelection& upper,
                        const SketchDiag& sketch, Index* zero_rows = nullptr);

/// Divides every row with nonzero sum by its sum; all-zero rows pass through
/// (they are data: independent layer-wise sampling produces them).
Matrix row_normalize(const Matrix& m, Index* zero_rows = nullptr);

struct LadiesOptions {
  Replacement replacement = Replacement::kWith;
  bool normalize = true;      // row normalization stabilizes training
  bool anchor_upper = false;  // force upper nodes into the lower support
};

struct FastgcnOptions {
  Replacement replacement = Replacement::kWith;
  bool normalize = false;  // the published estimator has no normalization
};

struct NeighborOptions {
  // Default draws without replacement when the neighborhood is large enough;
  // the with-replacement override matches the variance formula's model.
  bool always_with_replacement = false;
};

/// Layer-dependent importance sampling, top-down from the output batch:
/// compute QP, draw s_layer nodes from ladies_probs, sketch, assemble the
/// modified Laplacian, normalize. With anchor_upper every upper node is
/// guaranteed a nonzero entry in its own row (it always lies in the
/// candidate set), at the price of up to |upper| extra columns per layer.
BatchPlan ladies_sample(const Laplacian& p, const SparseGraph& g,
                        const RowSelection& batch, Index s_layer,
                        int num_layers, Rng& rng,
                        const LadiesOptions& opts = {});

/// Independent layer-wise importance sampling with the static degree-based
/// law. Sampled rows can be all-zero on sparse graphs; the plan records how
/// many.
BatchPlan fastgcn_sample(const Laplacian& p, const RowSelection& batch,
                         Index s_layer, int num_layers, Rng& rng,
                         const FastgcnOptions& opts = {});

/// Node-wise neighbor sampling: each occurrence of a node at layer l draws
/// s_node of its closed neighborhood independently, with entry
/// (|N(v)|/s_node) * P(v,j) * count. The lower list concatenates each
/// occurrence's draws, so the receptive field grows by a factor of at most
/// s_node per layer.
BatchPlan neighbor_sample(const Laplacian& p, const SparseGraph& g,
                          const RowSelection& batch, Index s_node,
                          int num_layers, Rng& rng,
                          const NeighborOptions& opts = {});

/// Every layer selects all nodes and p_tilde is P itself. Deterministic.
BatchPlan full_batch_plan(const Laplacian& p, int num_layers);

}  // namespace ladies
