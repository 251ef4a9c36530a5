#include "ladies/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ladies {

double micro_f1(const std::vector<Index>& predictions,
                const std::vector<Index>& labels) {
  if (predictions.size() != labels.size()) {
    throw std::invalid_argument("micro_f1: prediction/label count mismatch");
  }
  if (predictions.empty()) return 0.0;
  long long tp = 0, fp = 0, fn = 0;
  for (size_t i = 0; i < predictions.size(); ++i) {
    if (predictions[i] == labels[i]) {
      ++tp;
    } else {
      ++fp;  // wrong prediction counted against the predicted class
      ++fn;  // and as a miss for the true class
    }
  }
  return 2.0 * static_cast<double>(tp) /
         static_cast<double>(2 * tp + fp + fn);
}

std::string sampler_name(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::kLadies:
      return "ladies";
    case SamplerKind::kFastgcn:
      return "fastgcn";
    case SamplerKind::kNeighbor:
      return "neighbor";
    case SamplerKind::kFullBatch:
      return "full";
  }
  return "unknown";
}

Aggregate aggregate(const std::vector<double>& xs) {
  Aggregate a;
  if (xs.empty()) return a;
  double sum = 0.0;
  for (double x : xs) sum += x;
  a.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - a.mean) * (x - a.mean);
    a.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return a;
}

namespace {

std::vector<double> collect(const std::vector<RepResult>& reps,
                            double (*get)(const RepResult&)) {
  std::vector<double> xs;
  xs.reserve(reps.size());
  for (const RepResult& r : reps) {
    if (!r.diverged) xs.push_back(get(r));
  }
  return xs;
}

}  // namespace

Aggregate RunMetrics::test_f1() const {
  return aggregate(collect(reps, [](const RepResult& r) { return r.test_f1; }));
}

Aggregate RunMetrics::train_seconds() const {
  return aggregate(
      collect(reps, [](const RepResult& r) { return r.train_seconds; }));
}

Aggregate RunMetrics::batch_ms() const {
  return aggregate(
      collect(reps, [](const RepResult& r) { return r.batch_ms_mean; }));
}

Aggregate RunMetrics::batches() const {
  return aggregate(collect(reps, [](const RepResult& r) {
    return static_cast<double>(r.batches_to_convergence);
  }));
}

long long RunMetrics::activation_floats() const {
  long long peak = 0;
  for (const RepResult& r : reps) peak = std::max(peak, r.activation_floats);
  return peak;
}

long long RunMetrics::parameter_floats() const {
  return reps.empty() ? 0 : reps.front().parameter_floats;
}

double RunMetrics::memory_mb(double bytes_per_float) const {
  return static_cast<double>(activation_floats() + parameter_floats()) *
         bytes_per_float / (1024.0 * 1024.0);
}

int RunMetrics::diverged_reps() const {
  int n = 0;
  for (const RepResult& r : reps) n += r.diverged ? 1 : 0;
  return n;
}

std::vector<Index> predict(const GcnModel& model, const Laplacian& p,
                           const Matrix& x, const std::vector<Index>& rows) {
  const Matrix logits = forward_exact(model, p, x);
  std::vector<Index> out;
  out.reserve(rows.size());
  for (Index r : rows) {
    Index best = 0;
    logits.row(r).maxCoeff(&best);
    out.push_back(best);
  }
  return out;
}

namespace {

std::vector<Index> gather_labels(const Dataset& d,
                                 const std::vector<Index>& rows) {
  std::vector<Index> out;
  out.reserve(rows.size());
  for (Index r : rows) out.push_back(d.labels[static_cast<size_t>(r)]);
  return out;
}

struct BatchStep {
  Scalar loss = 0.0;
  long long activation_floats = 0;
};

RepResult run_repetition(const TrainConfig& config, const Dataset& dataset,
                         const Laplacian& p, const TrainHooks& hooks,
                         Rng rep_rng, int rep_index) {
  const Index num_classes = dataset.num_classes();
  std::vector<Index> dims;
  dims.push_back(static_cast<Index>(dataset.features.cols()));
  for (int l = 1; l < config.layers; ++l) dims.push_back(config.hidden);
  dims.push_back(num_classes);

  Rng init_rng = rep_rng.child(0);
  Rng batch_rng = rep_rng.child(1);
  Rng sampler_rng = rep_rng.child(2);

  GcnModel model = init_weights(dims, init_rng);
  AdamState adam = AdamState::init(model, config.lr);

  const bool normalize_default = config.sampler == SamplerKind::kLadies;
  const bool normalize = config.normalize.value_or(normalize_default);
  const bool anchor = config.anchor.value_or(true);

  const Index batch_size =
      std::min<Index>(config.batch,
                      static_cast<Index>(dataset.train_idx.size()));
  if (batch_size < 1) {
    throw std::invalid_argument("train: empty training split");
  }

  RepResult rep;
  for (size_t l = 0; l + 1 < dims.size(); ++l) {
    rep.parameter_floats += static_cast<long long>(dims[l]) *
                            static_cast<long long>(dims[l + 1]);
  }

  GcnModel best_model = model;
  double best_val = -std::numeric_limits<double>::infinity();
  double best_significant = -std::numeric_limits<double>::infinity();
  long best_batch = 0;
  long last_improvement_batch = 0;

  std::vector<double> batch_ms;
  batch_ms.reserve(static_cast<size_t>(config.max_batches));
  long long train_ns = 0;

  for (long batch_idx = 1; batch_idx <= config.max_batches; ++batch_idx) {
    const std::int64_t t0 = hooks.now_ns();
    BatchStep step;
    try {
      // Output-layer batch: uniform draw without replacement from the
      // training split, sorted for reproducibility.
      std::vector<Index> batch_nodes(static_cast<size_t>(batch_size));
      {
        auto pick = sample_without_replacement(
            static_cast<Index>(dataset.train_idx.size()), batch_size,
            batch_rng);
        std::sort(pick.begin(), pick.end());
        for (size_t i = 0; i < pick.size(); ++i) {
          batch_nodes[i] = dataset.train_idx[static_cast<size_t>(pick[i])];
        }
      }
      const RowSelection batch(batch_nodes);
      const std::vector<Index> labels = gather_labels(dataset, batch_nodes);

      if (config.sampler == SamplerKind::kFullBatch) {
        ExactTrace trace;
        const Matrix logits =
            forward_exact_traced(model, p, dataset.features, &trace);
        LossGrad lg = loss_and_grad_exact(model, p, trace, logits,
                                          batch_nodes, labels);
        step.loss = lg.loss;
        adam_step(model, adam, lg.grads);
        step.activation_floats =
            static_cast<long long>(config.layers) *
            static_cast<long long>(p.num_nodes()) *
            static_cast<long long>(config.hidden);
      } else {
        BatchPlan plan;
        switch (config.sampler) {
          case SamplerKind::kLadies: {
            LadiesOptions opts;
            opts.normalize = normalize;
            opts.anchor_upper = anchor;
            plan = ladies_sample(p, dataset.graph, batch, config.s_layer,
                                 config.layers, sampler_rng, opts);
            break;
          }
          case SamplerKind::kFastgcn: {
            FastgcnOptions opts;
            opts.normalize = normalize;
            plan = fastgcn_sample(p, batch, config.s_layer, config.layers,
                                  sampler_rng, opts);
            break;
          }
          case SamplerKind::kNeighbor: {
            plan = neighbor_sample(p, dataset.graph, batch, config.s_node,
                                   config.layers, sampler_rng);
            break;
          }
          case SamplerKind::kFullBatch:
            break;
        }
        ForwardTrace trace;
        const Matrix logits =
            forward_sampled(model, plan, dataset.features, &trace);
        LossGrad lg = loss_and_grad(model, trace, logits, labels);
        step.loss = lg.loss;
        adam_step(model, adam, lg.grads);
        step.activation_floats =
            activation_footprint(plan, config.hidden, dims).activation_floats;
      }
    } catch (const std::runtime_error&) {
      // Divergence (non-finite logits or gradients) aborts the repetition.
      rep.diverged = true;
      rep.batches_run = batch_idx;
      break;
    }
    const std::int64_t t1 = hooks.now_ns();
    train_ns += t1 - t0;
    batch_ms.push_back(static_cast<double>(t1 - t0) / 1e6);
    rep.activation_floats =
        std::max(rep.activation_floats, step.activation_floats);
    rep.batches_run = batch_idx;

    if (!std::isfinite(step.loss)) {
      rep.diverged = true;
      break;
    }

    if (batch_idx % config.eval_every == 0) {
      // Validation runs off the training clock.
      const double val_f1 = hooks.evaluate(model, batch_idx);
      if (val_f1 > best_val) {
        best_val = val_f1;
        best_model = model;
        best_batch = batch_idx;
      }
      if (val_f1 > best_significant + config.threshold) {
        best_significant = val_f1;
        last_improvement_batch = batch_idx;
      }
      if (batch_idx - last_improvement_batch >= config.patience) {
        break;
      }
    }
  }

  rep.train_seconds = static_cast<double>(train_ns) / 1e9;
  const Aggregate ms = aggregate(batch_ms);
  rep.batch_ms_mean = ms.mean;
  rep.batch_ms_std = ms.stddev;
  rep.best_val_f1 = best_val;
  rep.batches_to_convergence = best_batch;

  if (!rep.diverged) {
    const std::vector<Index> preds =
        predict(best_model, p, dataset.features, dataset.test_idx);
    rep.test_f1 = micro_f1(preds, gather_labels(dataset, dataset.test_idx));
    if (!config.checkpoint_path.empty()) {
      std::string path = config.checkpoint_path;
      if (config.reps > 1) path += ".rep" + std::to_string(rep_index);
      save_model(best_model, path);
    }
  }
  return rep;
}

}  // namespace

RunMetrics train(const TrainConfig& config, const Dataset& dataset) {
  return train(config, dataset, TrainHooks{});
}

RunMetrics train(const TrainConfig& config, const Dataset& dataset,
                 const TrainHooks& hooks) {
  if (config.layers < 1 || config.hidden < 1 || config.batch < 1 ||
      config.patience < 1 || config.eval_every < 1 || config.reps < 1 ||
      config.max_batches < 1 || config.threshold < 0.0) {
    throw std::invalid_argument("train: invalid configuration");
  }
  validate_dataset(dataset);
  if (dataset.train_idx.empty() || dataset.val_idx.empty() ||
      dataset.test_idx.empty()) {
    throw std::invalid_argument("train: all three splits must be nonempty");
  }

  const Laplacian p = normalized_laplacian(dataset.graph);

  TrainHooks effective = hooks;
  if (!effective.now_ns) {
    effective.now_ns = []() {
      return std::chrono::duration_cast<std::chrono::nanoseconds>(
                 std::chrono::steady_clock::now().time_since_epoch())
          .count();
    };
  }
  if (!effective.evaluate) {
    effective.evaluate = [&dataset, &p](const GcnModel& model, long) {
      const std::vector<Index> preds =
          predict(model, p, dataset.features, dataset.val_idx);
      return micro_f1(preds, gather_labels(dataset, dataset.val_idx));
    };
  }

  Rng root(config.seed);
  RunMetrics metrics;
  metrics.reps.reserve(static_cast<size_t>(config.reps));
  for (int r = 0; r < config.reps; ++r) {
    metrics.reps.push_back(
        run_repetition(config, dataset, p, effective,
                       root.child(static_cast<std::uint64_t>(r) + 1000), r));
  }
  return metrics;
}

}  // namespace ladies
