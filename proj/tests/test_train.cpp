#include "ladies/train.hpp"

#include "doctest.h"
#include "oracles.hpp"

#include <cmath>
#include <stdexcept>

using namespace ladies;

namespace {

Dataset separable_sbm(std::uint64_t seed, Index n = 60) {
  SyntheticSpec spec;
  spec.kind = SyntheticSpec::Kind::kSbm;
  spec.num_nodes = n;
  spec.sbm_blocks = 2;
  spec.sbm_p_in = 0.2;
  spec.sbm_p_out = 0.02;
  spec.features = SyntheticSpec::Features::kGaussian;
  spec.feature_dim = 8;
  spec.feature_noise = 0.3;
  Rng rng(seed);
  return generate(spec, rng);
}

// Clock advancing a fixed amount per call; lets tests count what the
// training loop actually measures.
struct FakeClock {
  std::int64_t now = 0;
  std::int64_t step = 1000000;  // 1 ms per call
  std::int64_t operator()() {
    now += step;
    return now;
  }
};

}  // namespace

TEST_CASE("micro_f1") {
  CHECK(micro_f1({1, 2, 0}, {1, 2, 0}) == 1.0);
  CHECK(micro_f1({1, 1, 1}, {0, 0, 0}) == 0.0);
  // Hand confusion count: predictions vs labels over 3 classes.
  // labels: 0 0 1 1 2 2 ; preds: 0 1 1 2 2 2 -> 4 correct of 6.
  CHECK(micro_f1({0, 1, 1, 2, 2, 2}, {0, 0, 1, 1, 2, 2}) ==
        doctest::Approx(4.0 / 6.0));
  CHECK_THROWS_AS(micro_f1({0}, {0, 1}), std::invalid_argument);
}

TEST_CASE("patience mechanics with a deterministic stub evaluator") {
  const Dataset d = separable_sbm(1);
  TrainConfig config;
  config.sampler = SamplerKind::kLadies;
  config.s_layer = 16;
  config.layers = 2;
  config.hidden = 8;
  config.batch = 16;
  config.patience = 7;
  config.threshold = 0.01;
  config.max_batches = 100;
  config.reps = 1;
  config.seed = 3;

  // Improves at batches 1..3, then plateaus below the threshold.
  TrainHooks hooks;
  FakeClock clock;
  hooks.now_ns = [&clock]() { return clock(); };
  hooks.evaluate = [](const GcnModel&, long batch) {
    return batch <= 3 ? 0.1 * static_cast<double>(batch) : 0.305;
  };
  const RunMetrics metrics = train(config, d, hooks);
  REQUIRE(metrics.reps.size() == 1);
  // Last significant improvement at batch 3; stops exactly patience later.
  CHECK(metrics.reps[0].batches_run == 3 + 7);
  CHECK(metrics.reps[0].best_val_f1 == doctest::Approx(0.305));
  CHECK(metrics.reps[0].batches_to_convergence == 4);
}

TEST_CASE("the best checkpoint is never beaten by an earlier one") {
  const Dataset d = separable_sbm(2);
  TrainConfig config;
  config.sampler = SamplerKind::kFastgcn;
  config.s_layer = 16;
  config.layers = 2;
  config.hidden = 8;
  config.batch = 16;
  config.patience = 10;
  config.max_batches = 60;
  config.reps = 1;
  config.seed = 4;

  // Rises to a peak at batch 5 and decays after.
  TrainHooks hooks;
  hooks.evaluate = [](const GcnModel&, long batch) {
    return batch <= 5 ? 0.1 * static_cast<double>(batch)
                      : 0.5 - 0.01 * static_cast<double>(batch);
  };
  const RunMetrics metrics = train(config, d, hooks);
  CHECK(metrics.reps[0].best_val_f1 == doctest::Approx(0.5));
  CHECK(metrics.reps[0].batches_to_convergence == 5);
}

TEST_CASE("validation time is excluded from the training clock") {
  const Dataset d = separable_sbm(3);
  TrainConfig config;
  config.sampler = SamplerKind::kLadies;
  config.s_layer = 8;
  config.layers = 2;
  config.hidden = 8;
  config.batch = 8;
  config.patience = 5;
  config.max_batches = 10;
  config.reps = 1;
  config.eval_every = 2;

  FakeClock clock;
  long evals = 0;
  TrainHooks hooks;
  hooks.now_ns = [&clock]() { return clock(); };
  hooks.evaluate = [&clock, &evals](const GcnModel&, long) {
    clock.now += 50000000;  // 50 ms of evaluation work per call
    ++evals;
    return 0.5;
  };
  const RunMetrics metrics = train(config, d, hooks);
  const RepResult& rep = metrics.reps[0];
  // Each batch costs exactly one clock tick (1 ms); evaluation cost must not
  // leak in even though every eval burns 50 ms.
  CHECK(rep.train_seconds ==
        doctest::Approx(1e-3 * static_cast<double>(rep.batches_run)));
  CHECK(evals > 0);
}

TEST_CASE("fixed seeds reproduce every non-wall-clock metric") {
  const Dataset d = separable_sbm(4);
  TrainConfig config;
  config.sampler = SamplerKind::kLadies;
  config.s_layer = 16;
  config.layers = 2;
  config.hidden = 8;
  config.batch = 16;
  config.patience = 8;
  config.max_batches = 40;
  config.reps = 2;
  config.seed = 99;

  const RunMetrics a = train(config, d);
  const RunMetrics b = train(config, d);
  REQUIRE(a.reps.size() == b.reps.size());
  for (size_t r = 0; r < a.reps.size(); ++r) {
    CHECK(a.reps[r].test_f1 == b.reps[r].test_f1);
    CHECK(a.reps[r].best_val_f1 == b.reps[r].best_val_f1);
    CHECK(a.reps[r].batches_run == b.reps[r].batches_run);
    CHECK(a.reps[r].batches_to_convergence == b.reps[r].batches_to_convergence);
    CHECK(a.reps[r].activation_floats == b.reps[r].activation_floats);
  }
}

TEST_CASE("full-batch training separates a clean SBM") {
  const Dataset d = separable_sbm(5, 80);
  TrainConfig config;
  config.sampler = SamplerKind::kFullBatch;
  config.layers = 2;
  config.hidden = 16;
  config.batch = 1024;  // whole training split
  config.patience = 50;
  config.max_batches = 200;
  config.reps = 1;
  config.seed = 11;

  const RunMetrics metrics = train(config, d);
  CHECK_FALSE(metrics.reps[0].diverged);
  CHECK(metrics.reps[0].test_f1 >= 0.95);

  // Train-split fit per the sanity fixture.
  const Laplacian p = normalized_laplacian(d.graph);
  Rng rng(11);
  // Re-train quickly and measure the train-split F1 of the final model via
  // the library's own pieces.
  TrainConfig ladies_cfg = config;
  ladies_cfg.sampler = SamplerKind::kLadies;
  ladies_cfg.s_layer = 32;
  const RunMetrics lm = train(ladies_cfg, d);
  CHECK(lm.reps[0].test_f1 >= 0.9);
}

TEST_CASE("divergence is recorded, not thrown") {
  const Dataset d = separable_sbm(6);
  TrainConfig config;
  config.sampler = SamplerKind::kLadies;
  config.s_layer = 16;
  config.layers = 2;
  config.hidden = 8;
  config.batch = 16;
  config.lr = 1e160;  // drives the logits to overflow within a few steps
  config.patience = 50;
  config.max_batches = 50;
  config.reps = 1;

  const RunMetrics metrics = train(config, d);
  CHECK(metrics.diverged_reps() == 1);
}

TEST_CASE("train validates its configuration") {
  const Dataset d = separable_sbm(7);
  TrainConfig config;
  config.layers = 0;
  CHECK_THROWS_AS(train(config, d), std::invalid_argument);
}
