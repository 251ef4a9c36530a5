#pragma once

#include "ladies/dataset.hpp"
#include "ladies/gcn.hpp"
#include "ladies/sampling.hpp"
#include "ladies/types.hpp"
#include "ladies/variance.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace ladies {

/// Micro-averaged F1 over single-label predictions; equals accuracy for
/// one prediction per node, computed here through the confusion counts.
double micro_f1(const std::vector<Index>& predictions,
                const std::vector<Index>& labels);

enum class SamplerKind { kLadies, kFastgcn, kNeighbor, kFullBatch };

std::string sampler_name(SamplerKind kind);

struct TrainConfig {
  SamplerKind sampler = SamplerKind::kLadies;
  Index s_layer = 512;
  Index s_node = 5;
  int layers = 5;
  Index hidden = 256;
  Index batch = 512;
  Scalar lr = 1e-3;
  Scalar threshold = 0.01;  // required validation improvement
  int patience = 200;       // batches without such improvement before stopping
  int max_batches = 2000;
  int eval_every = 1;  // validation cadence in batches
  int reps = 10;
  std::uint64_t seed = 0;
  std::optional<bool> normalize;  // overrides the per-sampler default
  std::optional<bool> anchor;     // LADIES upper-node anchoring (default on
                                  // for training; keeps batch rows connected)
  std::string checkpoint_path;    // when set, the best model of each
                                  // repetition is written here (".rep<k>"
                                  // appended when reps > 1)
};

struct RepResult {
  double test_f1 = 0.0;
  double best_val_f1 = 0.0;
  double train_seconds = 0.0;  // batch work only; validation excluded
  double batch_ms_mean = 0.0;
  double batch_ms_std = 0.0;
  long batches_to_convergence = 0;  // batch index of the best checkpoint
  long batches_run = 0;
  long long activation_floats = 0;  // peak analytic count over batches
  long long parameter_floats = 0;
  bool diverged = false;
};

struct Aggregate {
  double mean = 0.0;
  double stddev = 0.0;
};

Aggregate aggregate(const std::vector<double>& xs);

struct RunMetrics {
  std::vector<RepResult> reps;

  Aggregate test_f1() const;
  Aggregate train_seconds() const;
  Aggregate batch_ms() const;      // mean of per-rep means
  Aggregate batches() const;       // batches to convergence
  long long activation_floats() const;  // max over reps
  long long parameter_floats() const;
  double memory_mb(double bytes_per_float = 4.0) const;
  int diverged_reps() const;
};

/// Injection points for tests: a clock (used for every timing measurement)
/// and a validation evaluator (model, batch index) -> validation micro-F1.
struct TrainHooks {
  std::function<std::int64_t()> now_ns;
  std::function<double(const GcnModel&, long)> evaluate;
};

/// Mini-batch training with early stopping: per batch, sample a plan, run
/// the sampled forward/backward, take an Adam step; on the evaluation
/// cadence compute validation micro-F1 with an exact full-batch forward,
/// checkpoint the best model, and stop once no improvement above
/// `threshold` has been seen for `patience` batches. Test micro-F1 is
/// reported for the best checkpoint. Validation never counts toward the
/// training clock. The full-batch sampler trains through the exact path.
RunMetrics train(const TrainConfig& config, const Dataset& dataset);
RunMetrics train(const TrainConfig& config, const Dataset& dataset,
                 const TrainHooks& hooks);

/// Argmax predictions at the given rows of an exact full-batch forward.
std::vector<Index> predict(const GcnModel& model, const Laplacian& p,
                           const Matrix& x, const std::vector<Index>& rows);

}  // namespace ladies
