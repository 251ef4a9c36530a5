#include "ladies/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

namespace ladies {

namespace {

[[noreturn]] void fail_at(const std::string& file, long line,
                          const std::string& msg) {
  throw std::runtime_error(file + ":" + std::to_string(line) + ": " + msg);
}

struct LineReader {
  std::ifstream in;
  std::string file;
  long line = 0;

  explicit LineReader(const std::string& path) : in(path), file(path) {
    if (!in) throw std::runtime_error(path + ": cannot open");
  }

  std::string next() {
    std::string s;
    if (!std::getline(in, s)) fail_at(file, line + 1, "unexpected end of file");
    ++line;
    return s;
  }
};

std::vector<long long> parse_ints(const std::string& s, const std::string& file,
                                  long line) {
  std::vector<long long> out;
  std::istringstream iss(s);
  long long v = 0;
  while (iss >> v) out.push_back(v);
  if (!iss.eof()) fail_at(file, line, "malformed integer field");
  return out;
}

Index checked_index(long long v, Index limit, const std::string& file,
                    long line, const std::string& what) {
  if (v < 0 || v >= static_cast<long long>(limit)) {
    fail_at(file, line,
            what + " " + std::to_string(v) + " outside [0, " +
                std::to_string(limit) + ")");
  }
  return static_cast<Index>(v);
}

std::string format_scalar(Scalar v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

Index Dataset::num_classes() const {
  Index c = 0;
  for (Index y : labels) c = std::max(c, static_cast<Index>(y + 1));
  return c;
}

void validate_dataset(const Dataset& d) {
  validate_graph(d.graph);
  if (d.features.rows() != d.graph.num_nodes) {
    throw std::invalid_argument("dataset: feature rows != node count");
  }
  if (static_cast<Index>(d.labels.size()) != d.graph.num_nodes) {
    throw std::invalid_argument("dataset: label count != node count");
  }
  const Index c = d.num_classes();
  for (Index y : d.labels) {
    if (y < 0 || y >= c) {
      throw std::invalid_argument("dataset: label out of range");
    }
  }
  std::set<Index> seen;
  for (const auto* split : {&d.train_idx, &d.val_idx, &d.test_idx}) {
    for (Index i : *split) {
      if (i < 0 || i >= d.graph.num_nodes) {
        throw std::invalid_argument("dataset: split index out of range");
      }
      if (!seen.insert(i).second) {
        throw std::invalid_argument("dataset: splits overlap at node " +
                                    std::to_string(i));
      }
    }
  }
}

Matrix l1_normalize_rows(const Matrix& features) {
  Matrix out = features;
  for (Index i = 0; i < out.rows(); ++i) {
    const Scalar sum = out.row(i).cwiseAbs().sum();
    if (sum > 0.0) out.row(i) /= sum;
  }
  return out;
}

Dataset load_dataset(const std::string& dir, const LoadOptions& opts) {
  namespace fs = std::filesystem;
  Dataset d;

  {
    const std::string path = (fs::path(dir) / "graph.txt").string();
    LineReader r(path);
    const auto header = parse_ints(r.next(), path, 1);
    if (header.size() != 2 || header[0] < 0 || header[1] < 0) {
      fail_at(path, 1, "malformed header, expected \"n m\"");
    }
    const Index n = static_cast<Index>(header[0]);
    const long long m = header[1];
    std::vector<std::pair<Index, Index>> edges;
    edges.reserve(static_cast<size_t>(m));
    for (long long e = 0; e < m; ++e) {
      const std::string line = r.next();
      const auto uv = parse_ints(line, path, r.line);
      if (uv.size() != 2) fail_at(path, r.line, "expected \"u v\"");
      edges.emplace_back(checked_index(uv[0], n, path, r.line, "node"),
                         checked_index(uv[1], n, path, r.line, "node"));
    }
    d.graph = build_graph(edges, n);
  }

  {
    const std::string path = (fs::path(dir) / "features.txt").string();
    LineReader r(path);
    const auto header = parse_ints(r.next(), path, 1);
    if (header.size() != 2 || header[0] != d.graph.num_nodes || header[1] < 1) {
      fail_at(path, 1, "malformed header, expected \"n d\" with n matching graph.txt");
    }
    const Index n = static_cast<Index>(header[0]);
    const Index dim = static_cast<Index>(header[1]);
    d.features.resize(n, dim);
    for (Index i = 0; i < n; ++i) {
      const std::string line = r.next();
      std::istringstream iss(line);
      for (Index j = 0; j < dim; ++j) {
        Scalar v = 0;
        if (!(iss >> v)) fail_at(path, r.line, "feature row too short");
        d.features(i, j) = v;
      }
      Scalar extra;
      if (iss >> extra) fail_at(path, r.line, "feature row too long");
    }
  }

  {
    const std::string path = (fs::path(dir) / "labels.txt").string();
    LineReader r(path);
    d.labels.reserve(static_cast<size_t>(d.graph.num_nodes));
    for (Index i = 0; i < d.graph.num_nodes; ++i) {
      const auto v = parse_ints(r.next(), path, r.line);
      if (v.size() != 1) fail_at(path, r.line, "expected one class id");
      if (v[0] < 0) fail_at(path, r.line, "negative class id");
      d.labels.push_back(static_cast<Index>(v[0]));
    }
  }

  {
    const std::string path = (fs::path(dir) / "splits.txt").string();
    LineReader r(path);
    for (auto* split : {&d.train_idx, &d.val_idx, &d.test_idx}) {
      const std::string line = r.next();
      for (long long v : parse_ints(line, path, r.line)) {
        split->push_back(
            checked_index(v, d.graph.num_nodes, path, r.line, "split index"));
      }
    }
  }

  validate_dataset(d);  // reports split overlap and range violations
  if (opts.normalize_features) d.features = l1_normalize_rows(d.features);
  return d;
}

void save_dataset(const Dataset& d, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);

  {
    std::ofstream out(fs::path(dir) / "graph.txt");
    out << d.graph.num_nodes << " " << d.graph.num_edges() << "\n";
    for (Index u = 0; u < d.graph.num_nodes; ++u) {
      for (Index v : d.graph.neighbors(u)) {
        if (u < v) out << u << " " << v << "\n";
      }
    }
  }
  {
    std::ofstream out(fs::path(dir) / "features.txt");
    out << d.features.rows() << " " << d.features.cols() << "\n";
    for (Index i = 0; i < d.features.rows(); ++i) {
      for (Index j = 0; j < d.features.cols(); ++j) {
        if (j > 0) out << " ";
        out << format_scalar(d.features(i, j));
      }
      out << "\n";
    }
  }
  {
    std::ofstream out(fs::path(dir) / "labels.txt");
    for (Index y : d.labels) out << y << "\n";
  }
  {
    std::ofstream out(fs::path(dir) / "splits.txt");
    for (const auto* split : {&d.train_idx, &d.val_idx, &d.test_idx}) {
      for (size_t i = 0; i < split->size(); ++i) {
        if (i > 0) out << " ";
        out << (*split)[i];
      }
      out << "\n";
    }
  }
}

namespace {

SparseGraph generate_graph(const SyntheticSpec& spec, Rng& rng,
                           std::vector<Index>* block_of) {
  std::vector<std::pair<Index, Index>> edges;
  Index n = spec.num_nodes;
  switch (spec.kind) {
    case SyntheticSpec::Kind::kErdosRenyi: {
      for (Index i = 0; i < n; ++i) {
        for (Index j = i + 1; j < n; ++j) {
          if (rng.uniform01() < spec.er_p) edges.emplace_back(i, j);
        }
      }
      break;
    }
    case SyntheticSpec::Kind::kSbm: {
      const int blocks = std::max(1, spec.sbm_blocks);
      block_of->resize(static_cast<size_t>(n));
      for (Index i = 0; i < n; ++i) {
        (*block_of)[static_cast<size_t>(i)] =
            static_cast<Index>((static_cast<long long>(i) * blocks) / n);
      }
      for (Index i = 0; i < n; ++i) {
        for (Index j = i + 1; j < n; ++j) {
          const bool same =
              (*block_of)[static_cast<size_t>(i)] ==
              (*block_of)[static_cast<size_t>(j)];
          if (rng.uniform01() < (same ? spec.sbm_p_in : spec.sbm_p_out)) {
            edges.emplace_back(i, j);
          }
        }
      }
      break;
    }
    case SyntheticSpec::Kind::kStar: {
      for (Index leaf = 1; leaf < n; ++leaf) edges.emplace_back(0, leaf);
      break;
    }
    case SyntheticSpec::Kind::kPath: {
      for (Index i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
      break;
    }
    case SyntheticSpec::Kind::kGrid: {
      const Index rows = spec.grid_rows, cols = spec.grid_cols;
      n = rows * cols;
      auto at = [cols](Index r, Index c) { return r * cols + c; };
      for (Index r = 0; r < rows; ++r) {
        for (Index c = 0; c < cols; ++c) {
          if (c + 1 < cols) edges.emplace_back(at(r, c), at(r, c + 1));
          if (r + 1 < rows) edges.emplace_back(at(r, c), at(r + 1, c));
        }
      }
      break;
    }
  }
  return build_graph(edges, n);
}

}  // namespace

Dataset generate(const SyntheticSpec& spec, Rng& rng) {
  if (spec.kind == SyntheticSpec::Kind::kGrid) {
    if (spec.grid_rows < 1 || spec.grid_cols < 1) {
      throw std::invalid_argument("generate: grid needs positive rows and cols");
    }
  } else if (spec.num_nodes < 1) {
    throw std::invalid_argument("generate: need at least one node");
  }
  if (spec.er_p < 0.0 || spec.er_p > 1.0 || spec.sbm_p_in < 0.0 ||
      spec.sbm_p_in > 1.0 || spec.sbm_p_out < 0.0 || spec.sbm_p_out > 1.0) {
    throw std::invalid_argument("generate: probabilities must lie in [0, 1]");
  }

  Dataset d;
  std::vector<Index> block_of;
  d.graph = generate_graph(spec, rng, &block_of);
  const Index n = d.graph.num_nodes;

  d.labels.resize(static_cast<size_t>(n));
  const int classes = std::max(1, spec.kind == SyntheticSpec::Kind::kSbm
                                      ? spec.sbm_blocks
                                      : spec.classes);
  for (Index i = 0; i < n; ++i) {
    d.labels[static_cast<size_t>(i)] =
        block_of.empty() ? i % classes : block_of[static_cast<size_t>(i)];
  }

  if (spec.features == SyntheticSpec::Features::kOneHot) {
    d.features = Matrix::Identity(n, n);
  } else {
    const Index dim =
        spec.feature_dim > 0 ? spec.feature_dim
                             : std::max<Index>(static_cast<Index>(classes), 8);
    d.features.resize(n, dim);
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < dim; ++j) {
        d.features(i, j) = spec.feature_noise * rng.normal();
      }
      // Class-informative mean keeps simple fixtures linearly separable.
      d.features(i, d.labels[static_cast<size_t>(i)] % dim) += 1.0;
    }
  }

  const std::vector<Index> order = sample_without_replacement(n, n, rng);
  const Index train_end = (n * 6) / 10;
  const Index val_end = (n * 8) / 10;
  d.train_idx.assign(order.begin(), order.begin() + train_end);
  d.val_idx.assign(order.begin() + train_end, order.begin() + val_end);
  d.test_idx.assign(order.begin() + val_end, order.end());
  std::sort(d.train_idx.begin(), d.train_idx.end());
  std::sort(d.val_idx.begin(), d.val_idx.end());
  std::sort(d.test_idx.begin(), d.test_idx.end());

  validate_dataset(d);
  return d;
}

DegreeStats degree_stats(const SparseGraph& g) {
  DegreeStats s;
  if (g.num_nodes == 0) return s;
  Index max_deg = 0;
  for (Index u = 0; u < g.num_nodes; ++u) max_deg = std::max(max_deg, g.degree(u));
  s.max_degree = max_deg;
  s.average_degree =
      static_cast<double>(g.nnz()) / static_cast<double>(g.num_nodes);
  return s;
}

double average_candidate_size(const SparseGraph& g, Index b) {
  const Index n = g.num_nodes;
  if (b <= 0 || n == 0) return 0.0;
  if (b > n) b = n;
  double total = 0.0;
  for (Index j = 0; j < n; ++j) {
    const Index closed = g.degree(j) + 1;
    // P(batch misses N[j]) = C(n - closed, b) / C(n, b).
    double miss = 1.0;
    if (n - closed >= b) {
      for (Index i = 0; i < b; ++i) {
        miss *= static_cast<double>(n - closed - i) /
                static_cast<double>(n - i);
      }
    } else {
      miss = 0.0;
    }
    total += 1.0 - miss;
  }
  return total;
}

double estimate_candidate_size(const SparseGraph& g, Index b, long trials,
                               Rng& rng) {
  if (trials < 1) throw std::invalid_argument("estimate_candidate_size: trials >= 1");
  double total = 0.0;
  for (long t = 0; t < trials; ++t) {
    Rng child = rng.child(static_cast<std::uint64_t>(t));
    const std::vector<Index> batch =
        sample_without_replacement(g.num_nodes, b, child);
    total += static_cast<double>(neighbor_union(g, batch).size());
  }
  return total / static_cast<double>(trials);
}

std::vector<double> candidate_size_curve(const SparseGraph& g, Index max_b,
                                         long trials, Rng& rng) {
  const Index n = g.num_nodes;
  max_b = std::min(max_b, n);
  std::vector<double> curve(static_cast<size_t>(max_b), 0.0);
  std::vector<char> in_union(static_cast<size_t>(n));
  for (long t = 0; t < trials; ++t) {
    Rng child = rng.child(static_cast<std::uint64_t>(t));
    const std::vector<Index> order = sample_without_replacement(n, max_b, child);
    std::fill(in_union.begin(), in_union.end(), 0);
    Index count = 0;
    for (Index b = 0; b < max_b; ++b) {
      const Index v = order[static_cast<size_t>(b)];
      if (!in_union[static_cast<size_t>(v)]) {
        in_union[static_cast<size_t>(v)] = 1;
        ++count;
      }
      for (Index nb : g.neighbors(v)) {
        if (!in_union[static_cast<size_t>(nb)]) {
          in_union[static_cast<size_t>(nb)] = 1;
          ++count;
        }
      }
      curve[static_cast<size_t>(b)] += static_cast<double>(count);
    }
  }
  for (double& v : curve) v /= static_cast<double>(trials);
  return curve;
}

}  // namespace ladies
