#pragma once

#include "ladies/laplacian.hpp"
#include "ladies/rng.hpp"
#include "ladies/sampling.hpp"
#include "ladies/types.hpp"

#include <string>
#include <vector>

namespace ladies {

/// Multi-layer GCN: a stack of dense weight matrices W^(0..L-1). The
/// rectifier is applied after every layer except the last, which feeds
/// softmax cross-entropy. No bias terms.
struct GcnModel {
  std::vector<Matrix> weights;  // W^(l): d_l x d_{l+1}

  int num_layers() const { return static_cast<int>(weights.size()); }
  std::vector<Index> dims() const;
};

/// Glorot-uniform initialization, bound sqrt(6 / (d_in + d_out)).
GcnModel init_weights(const std::vector<Index>& dims, Rng& rng);

/// Exact forward pass Z^(l) = P H^(l-1) W^(l-1), H^(l) = relu(Z^(l)), last
/// layer linear. Returns the logits for all nodes.
Matrix forward_exact(const GcnModel& model, const Laplacian& p,
                     const Matrix& x);

/// Per-layer state retained for backprop. Indexing is forward order:
/// slot j belongs to layer j+1 (inputs[0] holds the selected feature rows).
/// `plan` points at the BatchPlan the forward ran on; it must outlive the
/// trace.
struct ForwardTrace {
  const BatchPlan* plan = nullptr;
  std::vector<Matrix> inputs;           // H~^(j), input to layer j+1
  std::vector<Matrix> aggregated;       // P~ * H~^(j)
  std::vector<Matrix> pre_activations;  // Z~^(j+1)
};

/// Sampled forward pass along a BatchPlan, bottom-up from rows Q^0 X.
/// Returns logits for the batch nodes; fills `trace` when given.
/// Throws on shape mismatch and on non-finite logits (training divergence).
Matrix forward_sampled(const GcnModel& model, const BatchPlan& plan,
                       const Matrix& x, ForwardTrace* trace = nullptr);

struct LossGrad {
  Scalar loss = 0.0;
  std::vector<Matrix> grads;  // one per W^(l)
};

/// Mean softmax cross-entropy over the batch plus reverse-mode gradients
/// through the sampled computation graph. The rectifier derivative at 0 is 0.
LossGrad loss_and_grad(const GcnModel& model, const ForwardTrace& trace,
                       const Matrix& logits, const std::vector<Index>& labels);

/// Exact-path counterpart used for full-batch training: forward trace over
/// the whole graph, loss restricted to `batch` rows.
struct ExactTrace {
  std::vector<Matrix> inputs;
  std::vector<Matrix> aggregated;
  std::vector<Matrix> pre_activations;
};

Matrix forward_exact_traced(const GcnModel& model, const Laplacian& p,
                            const Matrix& x, ExactTrace* trace);

LossGrad loss_and_grad_exact(const GcnModel& model, const Laplacian& p,
                             const ExactTrace& trace, const Matrix& logits,
                             const std::vector<Index>& batch,
                             const std::vector<Index>& labels);

struct AdamState {
  std::vector<Matrix> m;  // first moments, shaped like the weights
  std::vector<Matrix> v;  // second moments
  long step = 0;
  Scalar lr = 1e-3;
  Scalar beta1 = 0.9;
  Scalar beta2 = 0.999;
  Scalar eps = 1e-8;

  static AdamState init(const GcnModel& model, Scalar lr);
};

/// Bias-corrected Adam update, in place. Throws on non-finite gradients.
void adam_step(GcnModel& model, AdamState& adam,
               const std::vector<Matrix>& grads);

/// Checkpoint format: "GCNCKPT1" magic, u32 layer count L, u32 dims[L+1],
/// then each W^(l) as row-major 64-bit doubles, little-endian throughout.
void save_model(const GcnModel& model, const std::string& path);
GcnModel load_model(const std::string& path);

}  // namespace ladies
