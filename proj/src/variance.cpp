#include "ladies/variance.hpp"

#include "ladies/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace ladies {

Scalar lemma1_closed_form(const Matrix& a, const Matrix& b, const Vector& probs,
                          Index s) {
  if (s < 1) throw std::invalid_argument("lemma1: s must be >= 1");
  if (a.cols() != b.rows()) {
    throw std::invalid_argument("lemma1: inner dimensions do not match");
  }
  if (probs.size() != a.cols()) {
    throw std::invalid_argument("lemma1: probs length != columns of A");
  }
  const Vector col_sq = a.colwise().squaredNorm();
  const Scalar fro_a = col_sq.sum();
  if (!(fro_a > 0.0)) throw std::invalid_argument("lemma1: A is zero");
  for (Index k = 0; k < probs.size(); ++k) {
    if (std::abs(probs[k] - col_sq[k] / fro_a) > 1e-9) {
      throw std::invalid_argument(
          "lemma1: probs deviate from the column-norm law at index " +
          std::to_string(k) + "; the closed form only holds for that law");
    }
  }
  const Scalar fro_b = b.squaredNorm();
  const Scalar fro_ab = (a * b).squaredNorm();
  return (fro_a * fro_b - fro_ab) / static_cast<Scalar>(s);
}

std::string SchemeConfig::name() const {
  switch (kind) {
    case Kind::kLadies:
      return "ladies";
    case Kind::kFastgcn:
      return "fastgcn";
    case Kind::kNeighbor:
      return "neighbor";
    case Kind::kVrgcn:
      return "vrgcn";
  }
  return "unknown";
}

namespace {

// Runs fn(t) for t in [0, trials) over a small thread pool; results must be
// written to disjoint slots so the reduction stays deterministic.
template <typename Fn>
void parallel_trials(long trials, Fn&& fn) {
  unsigned workers = std::thread::hardware_concurrency();
  if (workers == 0) workers = 1;
  workers = std::min<unsigned>(workers, 8);
  if (trials < 256 || workers == 1) {
    for (long t = 0; t < trials; ++t) fn(t);
    return;
  }
  std::exception_ptr first_error = nullptr;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned k = 0; k < workers; ++k) {
    pool.emplace_back([&, k]() {
      try {
        for (long t = static_cast<long>(k); t < trials;
             t += static_cast<long>(workers)) {
          fn(t);
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

Matrix gather_rows(const Matrix& m, const std::vector<Index>& rows) {
  Matrix out(static_cast<Index>(rows.size()), m.cols());
  for (size_t k = 0; k < rows.size(); ++k) {
    out.row(static_cast<Index>(k)) = m.row(rows[k]);
  }
  return out;
}

struct MeanStderr {
  Scalar mean = 0.0;
  Scalar stderr_of_mean = 0.0;
};

MeanStderr reduce(const std::vector<Scalar>& values) {
  const size_t n = values.size();
  MeanStderr out;
  Scalar sum = 0.0;
  for (Scalar v : values) sum += v;
  out.mean = sum / static_cast<Scalar>(n);
  if (n > 1) {
    Scalar ss = 0.0;
    for (Scalar v : values) ss += (v - out.mean) * (v - out.mean);
    out.stderr_of_mean =
        std::sqrt(ss / static_cast<Scalar>(n - 1) / static_cast<Scalar>(n));
  }
  return out;
}

}  // namespace

VarianceReport empirical_variance(const SchemeConfig& config,
                                  const Laplacian& p, const SparseGraph& g,
                                  const Matrix& h, const Matrix& w,
                                  const RowSelection& batch, long trials,
                                  Rng& rng, const Matrix* h_bar) {
  if (trials < 2) {
    throw std::invalid_argument("empirical_variance: need trials >= 2");
  }
  if (batch.empty()) {
    throw std::invalid_argument("empirical_variance: batch must be nonempty");
  }
  if (config.kind == SchemeConfig::Kind::kVrgcn && h_bar == nullptr) {
    throw std::invalid_argument("empirical_variance: VR-GCN needs h_bar");
  }

  const Index n = p.num_nodes();
  const Index b = batch.size();
  const Matrix hw = h * w;
  const Matrix z = p.matrix * hw;  // exact intermediate embedding

  // VR-GCN estimates P (H - Hbar) W on top of the exact history term.
  Matrix hw_diff, z_bar;
  if (config.kind == SchemeConfig::Kind::kVrgcn) {
    hw_diff = (h - *h_bar) * w;
    z_bar = p.matrix * (*h_bar * w);
  }

  std::vector<Scalar> errs(static_cast<size_t>(trials), 0.0);
  parallel_trials(trials, [&](long t) {
    Rng child = rng.child(static_cast<std::uint64_t>(t));
    RowSelection batch_t = batch;
    if (config.resample_batch) {
      auto draw = sample_without_replacement(n, b, child);
      std::sort(draw.begin(), draw.end());
      batch_t = RowSelection(std::move(draw));
    }

    Matrix zt;
    switch (config.kind) {
      case SchemeConfig::Kind::kLadies: {
        LadiesOptions opts;
        opts.replacement = config.replacement;
        opts.normalize = config.normalize;
        opts.anchor_upper = config.anchor_upper;
        const BatchPlan plan =
            ladies_sample(p, g, batch_t, config.s, 1, child, opts);
        zt = plan.layers[0].p_tilde *
             gather_rows(hw, plan.layers[0].lower_nodes.selected);
        break;
      }
      case SchemeConfig::Kind::kFastgcn: {
        FastgcnOptions opts;
        opts.replacement = config.replacement;
        opts.normalize = config.normalize;
        const BatchPlan plan =
            fastgcn_sample(p, batch_t, config.s, 1, child, opts);
        zt = plan.layers[0].p_tilde *
             gather_rows(hw, plan.layers[0].lower_nodes.selected);
        break;
      }
      case SchemeConfig::Kind::kNeighbor:
      case SchemeConfig::Kind::kVrgcn: {
        NeighborOptions opts;
        opts.always_with_replacement = config.neighbor_with_replacement;
        const BatchPlan plan =
            neighbor_sample(p, g, batch_t, config.s, 1, child, opts);
        const Matrix& base =
            config.kind == SchemeConfig::Kind::kVrgcn ? hw_diff : hw;
        zt = plan.layers[0].p_tilde *
             gather_rows(base, plan.layers[0].lower_nodes.selected);
        if (config.kind == SchemeConfig::Kind::kVrgcn) {
          zt += gather_rows(z_bar, batch_t.selected);
        }
        break;
      }
    }
    const Matrix qz = gather_rows(z, batch_t.selected);
    errs[static_cast<size_t>(t)] = (zt - qz).squaredNorm();
  });

  const MeanStderr stats = reduce(errs);
  VarianceReport report;
  report.scheme = config.name();
  report.batch_size = b;
  report.s = config.s;
  report.trials = trials;
  report.empirical_mean = stats.mean / static_cast<Scalar>(b);
  report.empirical_stderr = stats.stderr_of_mean / static_cast<Scalar>(b);
  report.normalized = config.normalize;
  return report;
}

Scalar ladies_exact_variance(const Laplacian& p, const SparseGraph& g,
                             const RowSelection& batch, Index s,
                             const Matrix& h, const Matrix& w,
                             std::optional<Scalar> phi) {
  if (s < 1) throw std::invalid_argument("ladies_exact_variance: s >= 1");
  const Matrix hw = h * w;
  if (phi.has_value()) {
    Scalar max_row = 0.0;
    for (Index i = 0; i < hw.rows(); ++i) {
      max_row = std::max(max_row, hw.row(i).squaredNorm());
    }
    if (*phi < max_row * (1.0 - 1e-12)) {
      throw std::invalid_argument(
          "ladies_exact_variance: phi " + std::to_string(*phi) +
          " is below the actual max squared row norm " +
          std::to_string(max_row));
    }
  }

  const SparseRowMatrix qp = select_rows(p, batch);
  Scalar qp_fro = 0.0;
  for (Index row = 0; row < qp.outerSize(); ++row) {
    for (SparseRowMatrix::InnerIterator it(qp, row); it; ++it) {
      qp_fro += it.value() * it.value();
    }
  }

  Scalar lhw_sq = 0.0;
  for (Index i : neighbor_union(g, batch.selected)) {
    lhw_sq += hw.row(i).squaredNorm();
  }

  const Matrix z = p.matrix * hw;
  Scalar qz_sq = 0.0;
  for (Index i : batch.selected) qz_sq += z.row(i).squaredNorm();

  return (qp_fro * lhw_sq - qz_sq) / static_cast<Scalar>(s);
}

Scalar ladies_variance_bound(const Laplacian& p, const SparseGraph& g, Index b,
                             Index s, Scalar phi) {
  if (s < 1 || b < 1) {
    throw std::invalid_argument("ladies_variance_bound: b, s >= 1");
  }
  const Index n = p.num_nodes();
  // P is symmetric, so the cached column norms double as row norms.
  const Scalar max_row_sq = p.col_sq_norms.maxCoeff();
  const Scalar mean_row_sq = p.frob_sq / static_cast<Scalar>(n);
  const Scalar c2 = max_row_sq / mean_row_sq;
  const Scalar vbar = average_candidate_size(g, b);
  return c2 * phi * p.frob_sq * vbar /
         (static_cast<Scalar>(n) * static_cast<Scalar>(s));
}

Scalar fastgcn_variance(const Laplacian& p, const Matrix& h, const Matrix& w,
                        Index b, Index s) {
  if (s < 1 || b < 1) throw std::invalid_argument("fastgcn_variance: b, s >= 1");
  const Matrix hw = h * w;
  const Matrix z = p.matrix * hw;
  const Index n = p.num_nodes();
  return static_cast<Scalar>(b) *
         (p.frob_sq * hw.squaredNorm() - z.squaredNorm()) /
         (static_cast<Scalar>(n) * static_cast<Scalar>(s));
}

namespace {

Scalar nodewise_variance_per_node(const Laplacian& p, const SparseGraph& g,
                                  const Matrix& hw, Index m) {
  const Index n = p.num_nodes();
  Vector row_sq(n);
  for (Index j = 0; j < n; ++j) row_sq[j] = hw.row(j).squaredNorm();

  Scalar weighted = 0.0;
  for (Index i = 0; i < n; ++i) {
    const Scalar nnz_i = static_cast<Scalar>(g.degree(i) + 1);  // ||P_i||_0
    Scalar inner = 0.0;
    for (SparseRowMatrix::InnerIterator it(p.matrix, i); it; ++it) {
      inner += it.value() * it.value() * row_sq[it.col()];
    }
    weighted += nnz_i * inner;
  }
  const Scalar z_sq = (p.matrix * hw).squaredNorm();
  // Batch-averaged E||Z~-QZ||^2 carries b/(m|V|); the per-node report
  // divides the b back out.
  return (weighted - z_sq) / (static_cast<Scalar>(m) * static_cast<Scalar>(n));
}

}  // namespace

Scalar graphsage_variance(const Laplacian& p, const SparseGraph& g,
                          const Matrix& h, const Matrix& w, Index b, Index m) {
  if (m < 1 || b < 1) throw std::invalid_argument("graphsage_variance: b, m >= 1");
  (void)b;  // cancels in the per-batch-node report
  return nodewise_variance_per_node(p, g, h * w, m);
}

Scalar vrgcn_variance(const Laplacian& p, const SparseGraph& g, const Matrix& h,
                      const Matrix& h_bar, const Matrix& w, Index b, Index m) {
  if (m < 1 || b < 1) throw std::invalid_argument("vrgcn_variance: b, m >= 1");
  (void)b;
  return nodewise_variance_per_node(p, g, (h - h_bar) * w, m);
}

ZeroRowCensus zero_row_census(const SchemeConfig& config, const Laplacian& p,
                              const SparseGraph& g, Index batch_size,
                              int num_layers, long trials, Rng& rng) {
  if (batch_size < 1 || batch_size > p.num_nodes()) {
    throw std::invalid_argument("zero_row_census: bad batch size");
  }
  std::vector<Index> zero_per_plan(static_cast<size_t>(trials), 0);
  std::vector<long long> rows_per_plan(static_cast<size_t>(trials), 0);
  parallel_trials(trials, [&](long t) {
    Rng child = rng.child(static_cast<std::uint64_t>(t));
    auto draw = sample_without_replacement(p.num_nodes(), batch_size, child);
    std::sort(draw.begin(), draw.end());
    const RowSelection batch(std::move(draw));

    BatchPlan plan;
    switch (config.kind) {
      case SchemeConfig::Kind::kLadies: {
        LadiesOptions opts;
        opts.replacement = config.replacement;
        opts.normalize = config.normalize;
        opts.anchor_upper = config.anchor_upper;
        plan = ladies_sample(p, g, batch, config.s, num_layers, child, opts);
        break;
      }
      case SchemeConfig::Kind::kFastgcn: {
        FastgcnOptions opts;
        opts.replacement = config.replacement;
        opts.normalize = config.normalize;
        plan = fastgcn_sample(p, batch, config.s, num_layers, child, opts);
        break;
      }
      case SchemeConfig::Kind::kNeighbor:
      case SchemeConfig::Kind::kVrgcn: {
        NeighborOptions opts;
        opts.always_with_replacement = config.neighbor_with_replacement;
        plan = neighbor_sample(p, g, batch, config.s, num_layers, child, opts);
        break;
      }
    }
    Index zeros = 0;
    long long rows = 0;
    for (const LayerPlan& layer : plan.layers) {
      zeros += layer.zero_rows;
      rows += layer.p_tilde.rows();
    }
    zero_per_plan[static_cast<size_t>(t)] = zeros;
    rows_per_plan[static_cast<size_t>(t)] = rows;
  });

  ZeroRowCensus census;
  census.plans = trials;
  for (size_t t = 0; t < zero_per_plan.size(); ++t) {
    census.zero_rows += zero_per_plan[t];
    census.total_rows += rows_per_plan[t];
    if (zero_per_plan[t] > 0) ++census.plans_with_zero_row;
  }
  return census;
}

Scalar ComplexityEstimate::memory_total() const {
  Scalar total = 0.0;
  for (const auto& t : memory_terms) total += t.value;
  return total;
}

Scalar ComplexityEstimate::time_total() const {
  Scalar total = 0.0;
  for (const auto& t : time_terms) total += t.value;
  return total;
}

std::string scheme_name(Scheme s) {
  switch (s) {
    case Scheme::kFullBatch:
      return "full-batch";
    case Scheme::kGraphSage:
      return "graphsage";
    case Scheme::kVrGcn:
      return "vrgcn";
    case Scheme::kFastGcn:
      return "fastgcn";
    case Scheme::kLadies:
      return "ladies";
  }
  return "unknown";
}

ComplexityEstimate complexity_estimate(Scheme scheme, int layers, Index k,
                                       Index num_nodes, Index norm_a0, Index b,
                                       Index s_node, Index s_layer) {
  const Scalar L = static_cast<Scalar>(layers);
  const Scalar K = static_cast<Scalar>(k);
  const Scalar n = static_cast<Scalar>(num_nodes);
  const Scalar a0 = static_cast<Scalar>(norm_a0);
  const Scalar B = static_cast<Scalar>(b);
  const Scalar sn = static_cast<Scalar>(s_node);
  const Scalar sl = static_cast<Scalar>(s_layer);
  const Scalar d_avg = num_nodes > 0 ? a0 / n : 0.0;

  ComplexityEstimate est;
  est.scheme = scheme_name(scheme);
  const TermValue weight_mem{"L*K^2", L * K * K};
  switch (scheme) {
    case Scheme::kFullBatch:
      est.memory_terms = {{"L*|V|*K", L * n * K}, weight_mem};
      est.time_terms = {{"L*|A|_0*K", L * a0 * K}, {"L*|V|*K^2", L * n * K * K}};
      break;
    case Scheme::kGraphSage: {
      const Scalar fan = std::pow(sn, L - 1.0);
      est.memory_terms = {{"b*K*s_node^(L-1)", B * K * fan}, weight_mem};
      est.time_terms = {{"b*K*s_node^L", B * K * fan * sn},
                        {"b*K^2*s_node^(L-1)", B * K * K * fan}};
      break;
    }
    case Scheme::kVrGcn: {
      const Scalar fan = std::pow(sn, L - 1.0);
      est.memory_terms = {{"L*|V|*K", L * n * K}, weight_mem};
      est.time_terms = {{"b*D*K*s_node^(L-1)", B * d_avg * K * fan},
                        {"b*K^2*s_node^(L-1)", B * K * K * fan}};
      break;
    }
    case Scheme::kFastGcn:
    case Scheme::kLadies:
      est.memory_terms = {{"L*K*s_layer", L * K * sl}, weight_mem};
      est.time_terms = {{"L*K*s_layer^2", L * K * sl * sl},
                        {"L*K^2*s_layer", L * K * K * sl}};
      break;
  }
  return est;
}

ActivationFootprint activation_footprint(const BatchPlan& plan, Index hidden_k,
                                         const std::vector<Index>& dims) {
  ActivationFootprint fp;
  for (const LayerPlan& layer : plan.layers) {
    fp.activation_floats += static_cast<long long>(layer.upper_nodes.size()) *
                            static_cast<long long>(hidden_k);
  }
  for (size_t l = 0; l + 1 < dims.size(); ++l) {
    fp.parameter_floats +=
        static_cast<long long>(dims[l]) * static_cast<long long>(dims[l + 1]);
  }
  return fp;
}

}  // namespace ladies
