#pragma once

#include "ladies/laplacian.hpp"
#include "ladies/rng.hpp"
#include "ladies/sampling.hpp"
#include "ladies/sparse_graph.hpp"
#include "ladies/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ladies {

/// Closed-form sketch variance E||A S B - A B||_F^2 = (||A||_F^2 ||B||_F^2
/// - ||A B||_F^2) / s, valid only when probs is the column-norm law
/// p_k = ||A_{*,k}||^2 / ||A||_F^2. Throws std::invalid_argument when probs
/// deviates from that law by more than 1e-9 anywhere.
Scalar lemma1_closed_form(const Matrix& a, const Matrix& b, const Vector& probs,
                          Index s);

/// Single-layer scheme settings for the Monte-Carlo variance oracle.
struct SchemeConfig {
  enum class Kind { kLadies, kFastgcn, kNeighbor, kVrgcn };
  Kind kind = Kind::kLadies;
  Index s = 16;             // s_layer, or s_node / m for the node-wise kinds
  bool normalize = false;   // measure the row-normalized estimator instead
  Replacement replacement = Replacement::kWith;
  bool neighbor_with_replacement = true;  // the variance formulas' model
  bool anchor_upper = false;              // LADIES density safeguard
  bool resample_batch = false;  // fresh uniform batch per trial (matches the
                                // batch-averaged closed forms)

  std::string name() const;
};

struct VarianceReport {
  std::string scheme;
  Index batch_size = 0;
  Index s = 0;
  long trials = 0;
  Scalar empirical_mean = 0.0;    // E||Z~ - QZ||_F^2 / b, per batch node
  Scalar empirical_stderr = 0.0;  // standard error of that mean
  std::optional<Scalar> closed_form;
  bool normalized = false;
};

/// Draws `trials` independent single-layer plans and measures
/// ||Z~ - QZ||_F^2 / b against the exact Z = P H W. Trials run on child rng
/// streams indexed by trial, so the result is deterministic in the seed
/// regardless of thread count. `h_bar` is only read for the VR-GCN kind.
VarianceReport empirical_variance(const SchemeConfig& config,
                                  const Laplacian& p, const SparseGraph& g,
                                  const Matrix& h, const Matrix& w,
                                  const RowSelection& batch, long trials,
                                  Rng& rng, const Matrix* h_bar = nullptr);

/// Exact conditional expectation of the LADIES single-layer error for a
/// fixed batch: (||QP||_F^2 ||L H W||_F^2 - ||QZ||_F^2) / s with L the
/// indicator of the batch's closed neighbor union. Batch-sum level: divide
/// by |batch| to compare with empirical_variance. Reduces to the Lemma-1
/// value when the batch selects every node. If phi is given it must bound
/// the max squared row norm of H W, else std::invalid_argument.
Scalar ladies_exact_variance(const Laplacian& p, const SparseGraph& g,
                             const RowSelection& batch, Index s,
                             const Matrix& h, const Matrix& w,
                             std::optional<Scalar> phi = std::nullopt);

/// Assumption-level bound C2 * phi * ||P||_F^2 * Vbar(b) / (|V| s), per
/// batch node. C2 is instance-derived (max over mean squared row norm of P)
/// and Vbar(b) is the exact average candidate-set size over uniform batches.
Scalar ladies_variance_bound(const Laplacian& p, const SparseGraph& g, Index b,
                             Index s, Scalar phi);

/// FastGCN closed form b (||P||_F^2 ||H W||_F^2 - ||Z||_F^2) / (|V| s),
/// batch-averaged over uniform output batches. Batch-sum level.
Scalar fastgcn_variance(const Laplacian& p, const Matrix& h, const Matrix& w,
                        Index b, Index s);

/// Node-wise neighbor-sampling variance under with-replacement draws,
/// batch-averaged and reported per batch node:
/// (sum_i ||P_i||_0 sum_j ||P_ij (HW)_j||^2 - ||P H W||_F^2) / (m |V|).
Scalar graphsage_variance(const Laplacian& p, const SparseGraph& g,
                          const Matrix& h, const Matrix& w, Index b, Index m);

/// Same expression with H replaced by H - H_bar (history activations).
Scalar vrgcn_variance(const Laplacian& p, const SparseGraph& g,
                      const Matrix& h, const Matrix& h_bar, const Matrix& w,
                      Index b, Index m);

/// Zero-row census over freshly sampled plans: each trial draws a uniform
/// batch of size b and a full multi-layer plan, then counts all-zero rows.
struct ZeroRowCensus {
  long plans = 0;
  long plans_with_zero_row = 0;
  long long zero_rows = 0;
  long long total_rows = 0;

  double plan_frequency() const {
    return plans == 0 ? 0.0
                      : static_cast<double>(plans_with_zero_row) /
                            static_cast<double>(plans);
  }
};

ZeroRowCensus zero_row_census(const SchemeConfig& config, const Laplacian& p,
                              const SparseGraph& g, Index batch_size,
                              int num_layers, long trials, Rng& rng);

/// Table-style complexity formulas evaluated for concrete parameters.
struct TermValue {
  std::string term;
  Scalar value = 0.0;
};

struct ComplexityEstimate {
  std::string scheme;
  std::vector<TermValue> memory_terms;
  std::vector<TermValue> time_terms;

  Scalar memory_total() const;
  Scalar time_total() const;
};

enum class Scheme { kFullBatch, kGraphSage, kVrGcn, kFastGcn, kLadies };

std::string scheme_name(Scheme s);

ComplexityEstimate complexity_estimate(Scheme scheme, int layers, Index k,
                                       Index num_nodes, Index norm_a0, Index b,
                                       Index s_node, Index s_layer);

/// Analytic activation accounting for one plan: every layer stores its
/// output rows at the hidden width K, so full-batch costs exactly L*n*K
/// floats. Parameters are counted from the actual weight shapes.
struct ActivationFootprint {
  long long activation_floats = 0;
  long long parameter_floats = 0;

  double total_mb(double bytes_per_float = 4.0) const {
    return static_cast<double>(activation_floats + parameter_floats) *
           bytes_per_float / (1024.0 * 1024.0);
  }
};

ActivationFootprint activation_footprint(const BatchPlan& plan, Index hidden_k,
                                         const std::vector<Index>& dims);

}  // namespace ladies
