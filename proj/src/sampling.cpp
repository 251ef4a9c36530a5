#include "ladies/sampling.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace ladies {

namespace {

void check_batch_args(const RowSelection& batch, Index s, int num_layers) {
  if (batch.empty()) {
    throw std::invalid_argument("sampler: batch must be nonempty");
  }
  if (s < 1) {
    throw std::invalid_argument("sampler: per-layer sample count must be >= 1");
  }
  if (num_layers < 1) {
    throw std::invalid_argument("sampler: need at least one layer");
  }
}

// Support indices and cumulative masses of a law; masses need not sum to 1.
struct SupportCdf {
  std::vector<Index> idx;
  std::vector<Scalar> cum;
  Scalar total = 0.0;
};

SupportCdf build_cdf(const Vector& probs) {
  SupportCdf cdf;
  cdf.idx.reserve(64);
  Scalar run = 0.0;
  for (Index i = 0; i < probs.size(); ++i) {
    if (probs[i] > 0.0) {
      run += probs[i];
      cdf.idx.push_back(i);
      cdf.cum.push_back(run);
    }
  }
  cdf.total = run;
  return cdf;
}

size_t draw_position(const SupportCdf& cdf, Rng& rng) {
  const Scalar u = rng.uniform01() * cdf.total;
  const auto it = std::upper_bound(cdf.cum.begin(), cdf.cum.end(), u);
  return std::min<size_t>(static_cast<size_t>(it - cdf.cum.begin()),
                          cdf.cum.size() - 1);
}

}  // namespace

Vector ladies_probs(const Laplacian& p, const RowSelection& upper) {
  Vector sq = Vector::Zero(p.num_nodes());
  for (Index k = 0; k < upper.size(); ++k) {
    const Index row = upper[k];
    if (row < 0 || row >= p.num_nodes()) {
      throw std::out_of_range("ladies_probs: node " + std::to_string(row) +
                              " out of range");
    }
    for (SparseRowMatrix::InnerIterator it(p.matrix, row); it; ++it) {
      sq[it.col()] += it.value() * it.value();
    }
  }
  const Scalar total = sq.sum();
  if (!(total > 0.0)) {
    throw std::runtime_error(
        "ladies_probs: ||QP||_F^2 == 0; Laplacian is corrupted (every row "
        "must carry its diagonal entry)");
  }
  return sq / total;
}

Vector fastgcn_probs(const Laplacian& p) {
  if (!(p.frob_sq > 0.0)) {
    throw std::runtime_error("fastgcn_probs: ||P||_F^2 == 0");
  }
  return p.col_sq_norms / p.frob_sq;
}

SketchDiag draw_sketch(const Vector& probs, Index s, Rng& rng,
                       Replacement mode) {
  if (s < 1) {
    throw std::invalid_argument("draw_sketch: sample count must be >= 1");
  }
  const SupportCdf cdf = build_cdf(probs);
  if (cdf.idx.empty()) {
    throw std::invalid_argument("draw_sketch: law has empty support");
  }

  SketchDiag sketch;
  if (mode == Replacement::kWithout &&
      s >= static_cast<Index>(cdf.idx.size())) {
    // Exhaustive draw: the estimator degenerates to the exact restricted sum.
    sketch.support = cdf.idx;
    sketch.weights.assign(cdf.idx.size(), 1.0);
    return sketch;
  }

  if (mode == Replacement::kWith) {
    std::map<Index, int> counts;  // ordered: support comes out sorted
    for (Index d = 0; d < s; ++d) {
      ++counts[cdf.idx[draw_position(cdf, rng)]];
    }
    sketch.support.reserve(counts.size());
    sketch.weights.reserve(counts.size());
    for (const auto& [node, c] : counts) {
      sketch.support.push_back(node);
      sketch.weights.push_back(static_cast<Scalar>(c) /
                               (static_cast<Scalar>(s) * probs[node]));
    }
    return sketch;
  }

  // Without replacement, s < support size: weighted reservoir via the
  // exponential-key order statistic (smallest -log(u)/p first).
  std::vector<std::pair<Scalar, Index>> keys;
  keys.reserve(cdf.idx.size());
  for (Index node : cdf.idx) {
    Scalar u = rng.uniform01();
    while (u <= 0.0) u = rng.uniform01();
    keys.emplace_back(-std::log(u) / probs[node], node);
  }
  std::nth_element(keys.begin(), keys.begin() + (s - 1), keys.end());
  keys.resize(static_cast<size_t>(s));
  std::sort(keys.begin(), keys.end(),
            [](const auto& a, const auto& b) { return a.second < b.second; });
  for (const auto& [key, node] : keys) {
    sketch.support.push_back(node);
    // Same discount as the i.i.d. scheme; acknowledged biased, ablation only.
    sketch.weights.push_back(1.0 / (static_cast<Scalar>(s) * probs[node]));
  }
  return sketch;
}

Matrix assemble_p_tilde(const Laplacian& p, const RowSelection& upper,
                        const SketchDiag& sketch, Index* zero_rows) {
  const auto& support = sketch.support;
  Matrix out = Matrix::Zero(upper.size(), static_cast<Index>(support.size()));
  Index zeros = 0;
  for (Index k = 0; k < upper.size(); ++k) {
    bool any = false;
    for (SparseRowMatrix::InnerIterator it(p.matrix, upper[k]); it; ++it) {
      const auto pos =
          std::lower_bound(support.begin(), support.end(), it.col());
      if (pos != support.end() && *pos == it.col()) {
        const size_t c = static_cast<size_t>(pos - support.begin());
        out(k, static_cast<Index>(c)) = it.value() * sketch.weights[c];
        any = true;
      }
    }
    if (!any) ++zeros;
  }
  if (zero_rows != nullptr) *zero_rows = zeros;
  return out;
}

Matrix row_normalize(const Matrix& m, Index* zero_rows) {
  Matrix out = m;
  Index zeros = 0;
  for (Index i = 0; i < out.rows(); ++i) {
    const Scalar sum = out.row(i).sum();
    if (sum != 0.0) {
      out.row(i) /= sum;
    } else {
      ++zeros;
    }
  }
  if (zero_rows != nullptr) *zero_rows = zeros;
  return out;
}

namespace {

// Shared top-down loop for the two layer-wise schemes. `law` yields the
// sampling probabilities for the current upper selection.
template <typename LawFn>
BatchPlan layerwise_sample(const Laplacian& p, const RowSelection& batch,
                           Index s_layer, int num_layers, Rng& rng,
                           LawFn&& law, Replacement replacement, bool normalize,
                           bool anchor_upper) {
  BatchPlan plan;
  plan.batch_nodes = batch;
  plan.layers.reserve(static_cast<size_t>(num_layers));

  RowSelection upper = batch;
  for (int l = num_layers; l >= 1; --l) {
    LayerPlan layer;
    layer.layer_index = l;
    layer.upper_nodes = upper;
    layer.probs = law(upper);

    SketchDiag sketch = draw_sketch(layer.probs, s_layer, rng, replacement);
    if (anchor_upper) {
      // Upper nodes always lie in the candidate set (closed neighborhoods),
      // so their law mass is positive and the as-if-one-draw weight is
      // well-defined. Guarantees a nonzero diagonal block in every row.
      SketchDiag anchored;
      std::vector<Index> sorted_upper = upper.selected;
      std::sort(sorted_upper.begin(), sorted_upper.end());
      sorted_upper.erase(std::unique(sorted_upper.begin(), sorted_upper.end()),
                         sorted_upper.end());
      size_t a = 0, b = 0;
      while (a < sketch.support.size() || b < sorted_upper.size()) {
        if (b == sorted_upper.size() ||
            (a < sketch.support.size() &&
             sketch.support[a] < sorted_upper[b])) {
          anchored.support.push_back(sketch.support[a]);
          anchored.weights.push_back(sketch.weights[a]);
          ++a;
        } else if (a == sketch.support.size() ||
                   sketch.support[a] > sorted_upper[b]) {
          const Index node = sorted_upper[b];
          anchored.support.push_back(node);
          anchored.weights.push_back(
              1.0 / (static_cast<Scalar>(s_layer) * layer.probs[node]));
          ++b;
        } else {
          anchored.support.push_back(sketch.support[a]);
          anchored.weights.push_back(sketch.weights[a]);
          ++a;
          ++b;
        }
      }
      sketch = std::move(anchored);
    }

    layer.lower_nodes = RowSelection(sketch.support);
    layer.p_tilde = assemble_p_tilde(p, upper, sketch, &layer.zero_rows);
    if (normalize) {
      layer.p_tilde = row_normalize(layer.p_tilde);
      layer.normalized = true;
    }
    upper = layer.lower_nodes;
    plan.layers.push_back(std::move(layer));
  }
  plan.input_nodes = plan.layers.back().lower_nodes;
  return plan;
}

}  // namespace

BatchPlan ladies_sample(const Laplacian& p, const SparseGraph& g,
                        const RowSelection& batch, Index s_layer,
                        int num_layers, Rng& rng, const LadiesOptions& opts) {
  check_batch_args(batch, s_layer, num_layers);
  auto law = [&p, &g](const RowSelection& upper) {
    Vector probs = ladies_probs(p, upper);
#ifndef NDEBUG
    // Support law: probs live exactly on the closed neighbor union.
    const std::vector<Index> uni = neighbor_union(g, upper.selected);
    size_t seen = 0;
    for (Index i = 0; i < probs.size(); ++i) {
      if (probs[i] > 0.0) {
        assert(seen < uni.size() && uni[seen] == i);
        ++seen;
      }
    }
    assert(seen == uni.size());
#else
    (void)g;
#endif
    return probs;
  };
  return layerwise_sample(p, batch, s_layer, num_layers, rng, law,
                          opts.replacement, opts.normalize, opts.anchor_upper);
}

BatchPlan fastgcn_sample(const Laplacian& p, const RowSelection& batch,
                         Index s_layer, int num_layers, Rng& rng,
                         const FastgcnOptions& opts) {
  check_batch_args(batch, s_layer, num_layers);
  const Vector probs = fastgcn_probs(p);
  auto law = [&probs](const RowSelection&) { return probs; };
  return layerwise_sample(p, batch, s_layer, num_layers, rng, law,
                          opts.replacement, opts.normalize,
                          /*anchor_upper=*/false);
}

BatchPlan neighbor_sample(const Laplacian& p, const SparseGraph& g,
                          const RowSelection& batch, Index s_node,
                          int num_layers, Rng& rng,
                          const NeighborOptions& opts) {
  (void)g;  // the closed neighborhoods are exactly the rows of P
  check_batch_args(batch, s_node, num_layers);

  BatchPlan plan;
  plan.batch_nodes = batch;
  plan.layers.reserve(static_cast<size_t>(num_layers));

  RowSelection upper = batch;
  for (int l = num_layers; l >= 1; --l) {
    LayerPlan layer;
    layer.layer_index = l;
    layer.upper_nodes = upper;

    // Columns are per-occurrence: each upper occurrence owns a contiguous
    // block of its distinct draws, so two occurrences of the same node keep
    // independent estimates (the node-wise redundancy the scheme pays for).
    std::vector<Index> lower;
    std::vector<std::vector<std::pair<Index, Scalar>>> rows(
        static_cast<size_t>(upper.size()));

    for (Index k = 0; k < upper.size(); ++k) {
      const Index v = upper[k];
      const Index* cols = p.matrix.innerIndexPtr();
      const Scalar* vals = p.matrix.valuePtr();
      const Index begin = p.matrix.outerIndexPtr()[v];
      const Index end = p.matrix.outerIndexPtr()[v + 1];
      const Index deg = end - begin;  // |N(v)| including v itself

      std::vector<std::pair<Index, int>> picks;  // (offset in row, count)
      Index draws = s_node;
      if (opts.always_with_replacement) {
        std::map<Index, int> counts;
        for (Index i = 0; i < s_node; ++i) ++counts[rng.uniform_index(deg)];
        picks.assign(counts.begin(), counts.end());
      } else if (deg > s_node) {
        // Partial Fisher-Yates over the row offsets.
        std::vector<Index> offsets(static_cast<size_t>(deg));
        for (Index i = 0; i < deg; ++i) offsets[static_cast<size_t>(i)] = i;
        for (Index i = 0; i < s_node; ++i) {
          const Index j = i + rng.uniform_index(deg - i);
          std::swap(offsets[static_cast<size_t>(i)],
                    offsets[static_cast<size_t>(j)]);
          picks.emplace_back(offsets[static_cast<size_t>(i)], 1);
        }
        std::sort(picks.begin(), picks.end());
      } else {
        // Neighborhood fits: take it whole. The effective draw count is the
        // neighborhood size, so the scale degenerates to 1 and the row of
        // P comes through exactly.
        for (Index i = 0; i < deg; ++i) picks.emplace_back(i, 1);
        draws = deg;
      }

      const Scalar scale =
          static_cast<Scalar>(deg) / static_cast<Scalar>(draws);
      auto& row = rows[static_cast<size_t>(k)];
      row.reserve(picks.size());
      for (const auto& [offset, count] : picks) {
        const Index col = static_cast<Index>(lower.size());
        lower.push_back(cols[begin + offset]);
        row.emplace_back(col, scale * vals[begin + offset] *
                                  static_cast<Scalar>(count));
      }
    }

    layer.lower_nodes = RowSelection(std::move(lower));
    layer.p_tilde = Matrix::Zero(upper.size(), layer.lower_nodes.size());
    for (Index k = 0; k < upper.size(); ++k) {
      for (const auto& [col, value] : rows[static_cast<size_t>(k)]) {
        layer.p_tilde(k, col) = value;
      }
    }
    upper = layer.lower_nodes;
    plan.layers.push_back(std::move(layer));
  }
  plan.input_nodes = plan.layers.back().lower_nodes;
  return plan;
}

BatchPlan full_batch_plan(const Laplacian& p, int num_layers) {
  if (num_layers < 1) {
    throw std::invalid_argument("full_batch_plan: need at least one layer");
  }
  const RowSelection all = RowSelection::all(p.num_nodes());
  const Matrix dense = Matrix(p.matrix);

  BatchPlan plan;
  plan.batch_nodes = all;
  plan.input_nodes = all;
  plan.layers.reserve(static_cast<size_t>(num_layers));
  for (int l = num_layers; l >= 1; --l) {
    LayerPlan layer;
    layer.layer_index = l;
    layer.upper_nodes = all;
    layer.lower_nodes = all;
    layer.p_tilde = dense;
    plan.layers.push_back(std::move(layer));
  }
  return plan;
}

}  // namespace ladies
