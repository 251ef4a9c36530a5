// Experiment runner: training with early stopping, benchmark tables,
// variance/complexity studies, and synthetic dataset generation.

#include "ladies/dataset.hpp"
#include "ladies/train.hpp"
#include "ladies/variance.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using json = nlohmann::json;
using namespace ladies;

void write_text(const std::string& text, const std::string& out_path) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot open output file " + out_path);
  out << text;
}

std::optional<bool> parse_on_off(const std::string& v) {
  if (v.empty()) return std::nullopt;
  if (v == "on") return true;
  if (v == "off") return false;
  throw CLI::ValidationError("expected 'on' or 'off', got '" + v + "'");
}

SamplerKind parse_sampler(const std::string& name) {
  if (name == "ladies") return SamplerKind::kLadies;
  if (name == "fastgcn") return SamplerKind::kFastgcn;
  if (name == "neighbor") return SamplerKind::kNeighbor;
  if (name == "full") return SamplerKind::kFullBatch;
  throw CLI::ValidationError("unknown sampler '" + name + "'");
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

struct TrainCli {
  std::string dataset_dir;
  std::string sampler = "ladies";
  TrainConfig config;
  std::string normalize;  // on/off/""
  std::string anchor;
  std::string out;
  std::string format = "text";
  std::string save_model_path;
  bool raw_features = false;
};

json metrics_to_json(const std::string& dataset, const std::string& method,
                     const TrainConfig& config, const RunMetrics& metrics) {
  json reps = json::array();
  for (const RepResult& r : metrics.reps) {
    reps.push_back({{"test_f1", r.test_f1},
                    {"best_val_f1", r.best_val_f1},
                    {"train_seconds", r.train_seconds},
                    {"batch_ms_mean", r.batch_ms_mean},
                    {"batch_ms_std", r.batch_ms_std},
                    {"batches_to_convergence", r.batches_to_convergence},
                    {"batches_run", r.batches_run},
                    {"activation_floats", r.activation_floats},
                    {"diverged", r.diverged}});
  }
  const Aggregate f1 = metrics.test_f1();
  const Aggregate secs = metrics.train_seconds();
  const Aggregate ms = metrics.batch_ms();
  const Aggregate batches = metrics.batches();
  return json{{"dataset", dataset},
              {"method", method},
              {"config",
               {{"sampler", sampler_name(config.sampler)},
                {"s_layer", config.s_layer},
                {"s_node", config.s_node},
                {"layers", config.layers},
                {"hidden", config.hidden},
                {"batch", config.batch},
                {"lr", config.lr},
                {"threshold", config.threshold},
                {"patience", config.patience},
                {"eval_every", config.eval_every},
                {"max_batches", config.max_batches},
                {"reps", config.reps},
                {"seed", config.seed}}},
              {"test_f1", {{"mean", f1.mean}, {"std", f1.stddev}}},
              {"total_time_s", {{"mean", secs.mean}, {"std", secs.stddev}}},
              {"batch_time_ms", {{"mean", ms.mean}, {"std", ms.stddev}}},
              {"batch_num", {{"mean", batches.mean}, {"std", batches.stddev}}},
              {"memory_mb", metrics.memory_mb()},
              {"activation_floats", metrics.activation_floats()},
              {"parameter_floats", metrics.parameter_floats()},
              {"diverged_reps", metrics.diverged_reps()},
              {"repetitions", reps}};
}

std::string metrics_to_text(const json& j) {
  char buf[256];
  std::ostringstream out;
  out << "dataset: " << j["dataset"].get<std::string>()
      << "  method: " << j["method"].get<std::string>() << "\n";
  std::snprintf(buf, sizeof(buf), "  %-16s %8.4f +- %.4f\n", "test micro-F1",
                j["test_f1"]["mean"].get<double>(),
                j["test_f1"]["std"].get<double>());
  out << buf;
  std::snprintf(buf, sizeof(buf), "  %-16s %8.3f +- %.3f s\n", "total time",
                j["total_time_s"]["mean"].get<double>(),
                j["total_time_s"]["std"].get<double>());
  out << buf;
  std::snprintf(buf, sizeof(buf), "  %-16s %8.3f +- %.3f ms\n", "batch time",
                j["batch_time_ms"]["mean"].get<double>(),
                j["batch_time_ms"]["std"].get<double>());
  out << buf;
  std::snprintf(buf, sizeof(buf), "  %-16s %8.1f +- %.1f\n", "batch num",
                j["batch_num"]["mean"].get<double>(),
                j["batch_num"]["std"].get<double>());
  out << buf;
  std::snprintf(buf, sizeof(buf), "  %-16s %8.2f MB\n", "memory",
                j["memory_mb"].get<double>());
  out << buf;
  if (j["diverged_reps"].get<int>() > 0) {
    out << "  diverged repetitions: " << j["diverged_reps"].get<int>() << "\n";
  }
  return out.str();
}

constexpr const char* kBenchmarkHeader =
    "dataset,method,f1_mean,f1_std,total_time_s_mean,total_time_s_std,"
    "mem_mb,batch_time_ms_mean,batch_time_ms_std,batch_num_mean,"
    "batch_num_std";

std::string metrics_to_csv_row(const json& j) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "%s,%s,%.6f,%.6f,%.4f,%.4f,%.3f,%.4f,%.4f,%.1f,%.1f",
                j["dataset"].get<std::string>().c_str(),
                j["method"].get<std::string>().c_str(),
                j["test_f1"]["mean"].get<double>(),
                j["test_f1"]["std"].get<double>(),
                j["total_time_s"]["mean"].get<double>(),
                j["total_time_s"]["std"].get<double>(),
                j["memory_mb"].get<double>(),
                j["batch_time_ms"]["mean"].get<double>(),
                j["batch_time_ms"]["std"].get<double>(),
                j["batch_num"]["mean"].get<double>(),
                j["batch_num"]["std"].get<double>());
  return buf;
}

std::string method_label(const TrainConfig& config) {
  switch (config.sampler) {
    case SamplerKind::kFullBatch:
      return "Full-Batch";
    case SamplerKind::kNeighbor:
      return "GraphSAGE(" + std::to_string(config.s_node) + ")";
    case SamplerKind::kFastgcn:
      return "FastGCN(" + std::to_string(config.s_layer) + ")";
    case SamplerKind::kLadies:
      return "LADIES(" + std::to_string(config.s_layer) + ")";
  }
  return "?";
}

int run_train(const TrainCli& cli) {
  LoadOptions load;
  load.normalize_features = !cli.raw_features;
  const Dataset dataset = load_dataset(cli.dataset_dir, load);

  TrainConfig config = cli.config;
  config.sampler = parse_sampler(cli.sampler);
  config.normalize = parse_on_off(cli.normalize);
  config.anchor = parse_on_off(cli.anchor);
  config.checkpoint_path = cli.save_model_path;

  const RunMetrics metrics = train(config, dataset);
  const json j = metrics_to_json(cli.dataset_dir, method_label(config), config,
                                 metrics);
  if (cli.format == "json") {
    write_text(j.dump(2) + "\n", cli.out);
  } else if (cli.format == "csv") {
    write_text(std::string(kBenchmarkHeader) + "\n" + metrics_to_csv_row(j) +
                   "\n",
               cli.out);
  } else {
    write_text(metrics_to_text(j), cli.out);
  }
  return metrics.diverged_reps() == static_cast<int>(metrics.reps.size()) ? 2
                                                                          : 0;
}

// ---------------------------------------------------------------------------
// benchmark
// ---------------------------------------------------------------------------

struct BenchmarkCli {
  std::string dataset_dir;
  TrainConfig base;
  std::string out;
  std::string format = "csv";
  bool raw_features = false;
};

int run_benchmark(const BenchmarkCli& cli) {
  LoadOptions load;
  load.normalize_features = !cli.raw_features;
  const Dataset dataset = load_dataset(cli.dataset_dir, load);

  // The standard comparison row set.
  std::vector<TrainConfig> rows;
  {
    TrainConfig full = cli.base;
    full.sampler = SamplerKind::kFullBatch;
    rows.push_back(full);
    TrainConfig sage = cli.base;
    sage.sampler = SamplerKind::kNeighbor;
    sage.s_node = 5;
    rows.push_back(sage);
    for (Index s : {Index{64}, Index{512}}) {
      TrainConfig fast = cli.base;
      fast.sampler = SamplerKind::kFastgcn;
      fast.s_layer = s;
      rows.push_back(fast);
    }
    for (Index s : {Index{64}, Index{512}}) {
      TrainConfig lad = cli.base;
      lad.sampler = SamplerKind::kLadies;
      lad.s_layer = s;
      rows.push_back(lad);
    }
  }

  json rows_json = json::array();
  std::ostringstream csv;
  csv << kBenchmarkHeader << "\n";
  for (const TrainConfig& config : rows) {
    std::cerr << "benchmark: running " << method_label(config) << "...\n";
    const RunMetrics metrics = train(config, dataset);
    const json j =
        metrics_to_json(cli.dataset_dir, method_label(config), config, metrics);
    rows_json.push_back(j);
    csv << metrics_to_csv_row(j) << "\n";
  }

  if (cli.format == "json") {
    write_text(rows_json.dump(2) + "\n", cli.out);
  } else if (cli.format == "text") {
    std::ostringstream out;
    for (const json& j : rows_json) out << metrics_to_text(j) << "\n";
    write_text(out.str(), cli.out);
  } else {
    write_text(csv.str(), cli.out);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// variance
// ---------------------------------------------------------------------------

struct VarianceCli {
  std::string dataset_dir;
  Index er_n = 100;
  double er_p = 0.03;
  Index batch = 64;
  std::vector<Index> sweep = {8, 16, 32, 64};
  long trials = 2000;
  int layers = 2;
  Index hidden = 64;
  long batch_draws = 200;  // batches averaged into the LADIES closed form
  std::uint64_t seed = 0;
  std::string hw = "trained";  // trained | random
  std::string out;
  std::string format = "json";
};

// Short full-batch run whose hidden activations and last weight supply the
// (H, W) pair the comparisons share.
std::pair<Matrix, Matrix> trained_hw(const Dataset& dataset,
                                     const Laplacian& p, Index hidden,
                                     std::uint64_t seed) {
  TrainConfig config;
  config.sampler = SamplerKind::kFullBatch;
  config.layers = 2;
  config.hidden = hidden;
  config.batch = 100000;
  config.lr = 0.01;
  config.patience = 50;
  config.max_batches = 100;
  config.eval_every = 10;
  config.reps = 1;
  config.seed = seed;
  train(config, dataset);  // warms nothing persistent; retrain determinstic

  // Re-derive the trained weights deterministically.
  Rng root(seed);
  Rng rep_rng = root.child(1000);
  Rng init_rng = rep_rng.child(0);
  std::vector<Index> dims = {static_cast<Index>(dataset.features.cols()),
                             hidden, dataset.num_classes()};
  GcnModel model = init_weights(dims, init_rng);
  AdamState adam = AdamState::init(model, config.lr);
  Rng batch_rng = rep_rng.child(1);
  std::vector<Index> all_train = dataset.train_idx;
  for (int step = 0; step < 100; ++step) {
    auto pick = sample_without_replacement(
        static_cast<Index>(all_train.size()),
        static_cast<Index>(all_train.size()), batch_rng);
    std::vector<Index> batch_nodes;
    for (Index i : pick) batch_nodes.push_back(all_train[static_cast<size_t>(i)]);
    std::sort(batch_nodes.begin(), batch_nodes.end());
    std::vector<Index> labels;
    for (Index v : batch_nodes) labels.push_back(dataset.labels[static_cast<size_t>(v)]);
    ExactTrace trace;
    const Matrix logits = forward_exact_traced(model, p, dataset.features, &trace);
    LossGrad lg = loss_and_grad_exact(model, p, trace, logits, batch_nodes, labels);
    adam_step(model, adam, lg.grads);
  }
  ExactTrace trace;
  forward_exact_traced(model, p, dataset.features, &trace);
  const Matrix h = trace.pre_activations[0].cwiseMax(0.0);  // H^(1)
  return {h, model.weights[1]};
}

int run_variance(const VarianceCli& cli) {
  Dataset dataset;
  std::string graph_name;
  if (!cli.dataset_dir.empty()) {
    dataset = load_dataset(cli.dataset_dir);
    graph_name = cli.dataset_dir;
  } else {
    SyntheticSpec spec;
    spec.kind = SyntheticSpec::Kind::kErdosRenyi;
    spec.num_nodes = cli.er_n;
    spec.er_p = cli.er_p;
    spec.features = SyntheticSpec::Features::kGaussian;
    spec.feature_dim = 16;
    Rng rng(cli.seed + 7);
    dataset = generate(spec, rng);
    graph_name = "er(" + std::to_string(cli.er_n) + "," +
                 std::to_string(cli.er_p) + ")";
  }
  const Laplacian p = normalized_laplacian(dataset.graph);

  Matrix h, w;
  if (cli.hw == "trained") {
    std::tie(h, w) = trained_hw(dataset, p, cli.hidden, cli.seed);
  } else {
    Rng rng(cli.seed + 13);
    h = Matrix(p.num_nodes(), cli.hidden);
    for (Index i = 0; i < h.rows(); ++i) {
      for (Index j = 0; j < h.cols(); ++j) h(i, j) = rng.normal();
    }
    w = Matrix(cli.hidden, std::max<Index>(dataset.num_classes(), 2));
    for (Index i = 0; i < w.rows(); ++i) {
      for (Index j = 0; j < w.cols(); ++j) w(i, j) = rng.normal();
    }
  }

  Rng batch_rng(cli.seed + 21);
  auto draw_batch = [&](Rng& rng) {
    auto nodes = sample_without_replacement(p.num_nodes(), cli.batch, rng);
    std::sort(nodes.begin(), nodes.end());
    return RowSelection(std::move(nodes));
  };
  const RowSelection study_batch = draw_batch(batch_rng);

  // LADIES closed form averaged over sampled batches (the batch-averaged
  // level at which it compares against the FastGCN value).
  auto ladies_closed = [&](Index s) {
    Rng rng(cli.seed + 31);
    double total = 0.0;
    for (long t = 0; t < cli.batch_draws; ++t) {
      Rng child = rng.child(static_cast<std::uint64_t>(t));
      const RowSelection b = draw_batch(child);
      total += ladies_exact_variance(p, dataset.graph, b, s, h, w) /
               static_cast<double>(b.size());
    }
    return total / static_cast<double>(cli.batch_draws);
  };

  json schemes = json::array();
  const std::vector<std::string> kinds = {"ladies", "fastgcn", "neighbor"};
  for (const std::string& kind : kinds) {
    for (Index s : cli.sweep) {
      SchemeConfig config;
      config.s = s;
      config.resample_batch = true;
      if (kind == "ladies") {
        config.kind = SchemeConfig::Kind::kLadies;
      } else if (kind == "fastgcn") {
        config.kind = SchemeConfig::Kind::kFastgcn;
      } else {
        config.kind = SchemeConfig::Kind::kNeighbor;
        config.neighbor_with_replacement = true;  // the formulas' model
      }

      Rng rng(cli.seed + 101 + static_cast<std::uint64_t>(s));
      const VarianceReport raw = empirical_variance(
          config, p, dataset.graph, h, w, study_batch, cli.trials, rng);
      SchemeConfig norm_config = config;
      norm_config.normalize = true;
      Rng rng2(cli.seed + 201 + static_cast<std::uint64_t>(s));
      const VarianceReport norm = empirical_variance(
          norm_config, p, dataset.graph, h, w, study_batch, cli.trials, rng2);

      std::optional<double> closed;
      if (kind == "ladies") {
        closed = ladies_closed(s);
      } else if (kind == "fastgcn") {
        closed = fastgcn_variance(p, h, w, cli.batch, s) /
                 static_cast<double>(cli.batch);
      } else {
        closed = graphsage_variance(p, dataset.graph, h, w, cli.batch, s);
      }

      Rng census_rng(cli.seed + 301 + static_cast<std::uint64_t>(s));
      SchemeConfig census_config = config;
      census_config.resample_batch = false;
      if (kind == "ladies") census_config.anchor_upper = true;
      const ZeroRowCensus census =
          zero_row_census(census_config, p, dataset.graph, cli.batch,
                          cli.layers, 500, census_rng);

      schemes.push_back(
          {{"scheme", kind},
           {"s", s},
           {"b", cli.batch},
           {"trials", cli.trials},
           {"empirical", {{"mean", raw.empirical_mean},
                          {"stderr", raw.empirical_stderr}}},
           {"empirical_normalized", {{"mean", norm.empirical_mean},
                                     {"stderr", norm.empirical_stderr}}},
           {"closed_form", closed.has_value() ? json(*closed) : json()},
           {"zero_row_census",
            {{"plans", census.plans},
             {"plans_with_zero_row", census.plans_with_zero_row},
             {"zero_rows", census.zero_rows},
             {"total_rows", census.total_rows}}}});
    }
  }

  const json report = {{"graph",
                        {{"name", graph_name},
                         {"nodes", p.num_nodes()},
                         {"edges", dataset.graph.num_edges()}}},
                       {"b", cli.batch},
                       {"hw_source", cli.hw},
                       {"neighbor_model", "with_replacement"},
                       {"seed", cli.seed},
                       {"schemes", schemes}};

  if (cli.format == "text") {
    std::ostringstream out;
    out << "variance study on " << graph_name << " (b=" << cli.batch << ")\n";
    char buf[256];
    for (const auto& s : report["schemes"]) {
      std::snprintf(buf, sizeof(buf),
                    "  %-9s s=%-4lld empirical %.6g +- %.2g   closed %s   "
                    "zero-row plans %lld/%lld\n",
                    s["scheme"].get<std::string>().c_str(),
                    s["s"].get<long long>(),
                    s["empirical"]["mean"].get<double>(),
                    s["empirical"]["stderr"].get<double>(),
                    s["closed_form"].is_null()
                        ? "n/a"
                        : std::to_string(s["closed_form"].get<double>()).c_str(),
                    s["zero_row_census"]["plans_with_zero_row"].get<long long>(),
                    s["zero_row_census"]["plans"].get<long long>());
      out << buf;
    }
    write_text(out.str(), cli.out);
  } else {
    write_text(report.dump(2) + "\n", cli.out);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// complexity
// ---------------------------------------------------------------------------

struct ComplexityCli {
  std::string dataset_dir;
  int layers = 5;
  Index hidden = 256;
  Index nodes = 2708;
  Index edges = 5278;  // undirected count; |A|_0 = 2x
  Index batch = 512;
  Index s_node = 5;
  Index s_layer = 512;
  std::string out;
  std::string format = "json";
};

int run_complexity(const ComplexityCli& cli) {
  Index n = cli.nodes;
  Index a0 = cli.edges * 2;
  if (!cli.dataset_dir.empty()) {
    const Dataset d = load_dataset(cli.dataset_dir);
    n = d.graph.num_nodes;
    a0 = d.graph.nnz();
  }

  json rows = json::array();
  std::ostringstream text;
  text << "scheme        memory              time\n";
  for (Scheme scheme : {Scheme::kFullBatch, Scheme::kGraphSage, Scheme::kVrGcn,
                        Scheme::kFastGcn, Scheme::kLadies}) {
    const ComplexityEstimate est =
        complexity_estimate(scheme, cli.layers, cli.hidden, n, a0, cli.batch,
                            cli.s_node, cli.s_layer);
    json mem = json::array(), time = json::array();
    for (const auto& t : est.memory_terms) {
      mem.push_back({{"term", t.term}, {"value", t.value}});
    }
    for (const auto& t : est.time_terms) {
      time.push_back({{"term", t.term}, {"value", t.value}});
    }
    rows.push_back({{"scheme", est.scheme},
                    {"memory_terms", mem},
                    {"memory_total", est.memory_total()},
                    {"time_terms", time},
                    {"time_total", est.time_total()}});
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-12s  %-18.6g  %-18.6g\n",
                  est.scheme.c_str(), est.memory_total(), est.time_total());
    text << buf;
  }

  const json report = {{"parameters",
                        {{"layers", cli.layers},
                         {"hidden", cli.hidden},
                         {"nodes", n},
                         {"norm_a0", a0},
                         {"batch", cli.batch},
                         {"s_node", cli.s_node},
                         {"s_layer", cli.s_layer}}},
                       {"schemes", rows}};
  if (cli.format == "text") {
    write_text(text.str(), cli.out);
  } else {
    write_text(report.dump(2) + "\n", cli.out);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// gen-data
// ---------------------------------------------------------------------------

struct GenDataCli {
  std::string out_dir;
  std::string kind = "er";
  Index nodes = 100;
  double er_p = 0.05;
  int blocks = 2;
  double p_in = 0.2;
  double p_out = 0.02;
  Index grid_rows = 0, grid_cols = 0;
  std::string features = "gaussian";
  Index feature_dim = 0;
  double noise = 0.5;
  int classes = 2;
  std::uint64_t seed = 0;
  std::string config_file;
};

void apply_config_file(GenDataCli& cli) {
  std::ifstream in(cli.config_file);
  if (!in) throw std::runtime_error("cannot open config " + cli.config_file);
  std::string line;
  long line_no = 0;
  std::map<std::string, std::string> kv;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error(cli.config_file + ":" +
                               std::to_string(line_no) + ": expected key=value");
    }
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  auto get = [&kv](const std::string& key, auto parse, auto& target) {
    if (auto it = kv.find(key); it != kv.end()) target = parse(it->second);
  };
  const auto to_s = [](const std::string& v) { return v; };
  const auto to_i = [](const std::string& v) { return static_cast<Index>(std::stoll(v)); };
  const auto to_int = [](const std::string& v) { return std::stoi(v); };
  const auto to_d = [](const std::string& v) { return std::stod(v); };
  const auto to_u = [](const std::string& v) { return static_cast<std::uint64_t>(std::stoull(v)); };
  get("kind", to_s, cli.kind);
  get("nodes", to_i, cli.nodes);
  get("er_p", to_d, cli.er_p);
  get("blocks", to_int, cli.blocks);
  get("p_in", to_d, cli.p_in);
  get("p_out", to_d, cli.p_out);
  get("grid_rows", to_i, cli.grid_rows);
  get("grid_cols", to_i, cli.grid_cols);
  get("features", to_s, cli.features);
  get("feature_dim", to_i, cli.feature_dim);
  get("noise", to_d, cli.noise);
  get("classes", to_int, cli.classes);
  get("seed", to_u, cli.seed);
}

int run_gen_data(GenDataCli cli) {
  if (!cli.config_file.empty()) apply_config_file(cli);

  SyntheticSpec spec;
  if (cli.kind == "er") {
    spec.kind = SyntheticSpec::Kind::kErdosRenyi;
  } else if (cli.kind == "sbm") {
    spec.kind = SyntheticSpec::Kind::kSbm;
  } else if (cli.kind == "star") {
    spec.kind = SyntheticSpec::Kind::kStar;
  } else if (cli.kind == "path") {
    spec.kind = SyntheticSpec::Kind::kPath;
  } else if (cli.kind == "grid") {
    spec.kind = SyntheticSpec::Kind::kGrid;
  } else {
    throw std::runtime_error("unknown generator kind '" + cli.kind + "'");
  }
  spec.num_nodes = cli.nodes;
  spec.er_p = cli.er_p;
  spec.sbm_blocks = cli.blocks;
  spec.sbm_p_in = cli.p_in;
  spec.sbm_p_out = cli.p_out;
  spec.grid_rows = cli.grid_rows;
  spec.grid_cols = cli.grid_cols;
  spec.features = cli.features == "onehot" ? SyntheticSpec::Features::kOneHot
                                           : SyntheticSpec::Features::kGaussian;
  spec.feature_dim = cli.feature_dim;
  spec.feature_noise = cli.noise;
  spec.classes = cli.classes;
  spec.seed = cli.seed;

  Rng rng(cli.seed);
  const Dataset d = generate(spec, rng);
  save_dataset(d, cli.out_dir);
  std::cerr << "wrote " << d.graph.num_nodes << " nodes, "
            << d.graph.num_edges() << " edges, "
            << d.features.cols() << " features to " << cli.out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse-graph mini-batch GCN training toolkit"};
  app.require_subcommand(1);

  TrainCli train_cli;
  CLI::App* train_cmd =
      app.add_subcommand("train", "Train one configuration and report metrics");
  train_cmd->add_option("--dataset", train_cli.dataset_dir, "dataset directory")
      ->required();
  train_cmd->add_option("--sampler", train_cli.sampler,
                        "ladies|fastgcn|neighbor|full");
  train_cmd->add_option("--s-layer", train_cli.config.s_layer,
                        "nodes per layer (ladies/fastgcn)");
  train_cmd->add_option("--s-node", train_cli.config.s_node,
                        "neighbors per node (neighbor)");
  train_cmd->add_option("--layers", train_cli.config.layers, "GCN depth");
  train_cmd->add_option("--hidden", train_cli.config.hidden, "hidden width");
  train_cmd->add_option("--batch", train_cli.config.batch, "batch size");
  train_cmd->add_option("--lr", train_cli.config.lr, "Adam learning rate");
  train_cmd->add_option("--patience", train_cli.config.patience,
                        "early-stop patience in batches");
  train_cmd->add_option("--threshold", train_cli.config.threshold,
                        "required validation improvement");
  train_cmd->add_option("--max-batches", train_cli.config.max_batches,
                        "hard batch cap");
  train_cmd->add_option("--eval-every", train_cli.config.eval_every,
                        "validation cadence in batches");
  train_cmd->add_option("--reps", train_cli.config.reps, "repetitions");
  train_cmd->add_option("--seed", train_cli.config.seed, "rng seed");
  train_cmd->add_option("--normalize", train_cli.normalize,
                        "row-normalize sampled Laplacians: on|off");
  train_cmd->add_option("--anchor", train_cli.anchor,
                        "anchor upper nodes in LADIES draws: on|off");
  train_cmd->add_option("--out", train_cli.out, "output path (default stdout)");
  train_cmd->add_option("--format", train_cli.format, "json|csv|text");
  train_cmd->add_option("--save-model", train_cli.save_model_path,
                        "write the best checkpoint per repetition");
  train_cmd->add_flag("--raw-features", train_cli.raw_features,
                      "skip L1 feature normalization");

  BenchmarkCli bench_cli;
  CLI::App* bench_cmd = app.add_subcommand(
      "benchmark", "Run the standard method comparison on one dataset");
  bench_cmd->add_option("--dataset", bench_cli.dataset_dir, "dataset directory")
      ->required();
  bench_cmd->add_option("--layers", bench_cli.base.layers, "GCN depth");
  bench_cmd->add_option("--hidden", bench_cli.base.hidden, "hidden width");
  bench_cmd->add_option("--batch", bench_cli.base.batch, "batch size");
  bench_cmd->add_option("--lr", bench_cli.base.lr, "Adam learning rate");
  bench_cmd->add_option("--patience", bench_cli.base.patience, "patience");
  bench_cmd->add_option("--threshold", bench_cli.base.threshold, "threshold");
  bench_cmd->add_option("--max-batches", bench_cli.base.max_batches, "cap");
  bench_cmd->add_option("--eval-every", bench_cli.base.eval_every, "cadence");
  bench_cmd->add_option("--reps", bench_cli.base.reps, "repetitions");
  bench_cmd->add_option("--seed", bench_cli.base.seed, "rng seed");
  bench_cmd->add_option("--out", bench_cli.out, "output path");
  bench_cmd->add_option("--format", bench_cli.format, "json|csv|text");
  bench_cmd->add_flag("--raw-features", bench_cli.raw_features,
                      "skip L1 feature normalization");

  VarianceCli var_cli;
  CLI::App* var_cmd = app.add_subcommand(
      "variance", "Empirical vs closed-form estimator variance study");
  var_cmd->add_option("--dataset", var_cli.dataset_dir,
                      "dataset directory (default: synthetic ER)");
  var_cmd->add_option("--er-n", var_cli.er_n, "synthetic graph size");
  var_cmd->add_option("--er-p", var_cli.er_p, "synthetic edge probability");
  var_cmd->add_option("--batch", var_cli.batch, "output batch size");
  var_cmd->add_option("--s-sweep", var_cli.sweep, "sample sizes to sweep");
  var_cmd->add_option("--trials", var_cli.trials, "Monte-Carlo trials per cell");
  var_cmd->add_option("--layers", var_cli.layers, "plan depth for the census");
  var_cmd->add_option("--hidden", var_cli.hidden, "H width");
  var_cmd->add_option("--seed", var_cli.seed, "rng seed");
  var_cmd->add_option("--hw", var_cli.hw,
                      "H,W source: trained|random (default trained)");
  var_cmd->add_option("--out", var_cli.out, "output path");
  var_cmd->add_option("--format", var_cli.format, "json|text");

  ComplexityCli cx_cli;
  CLI::App* cx_cmd = app.add_subcommand(
      "complexity", "Evaluate the per-scheme complexity formulas");
  cx_cmd->add_option("--dataset", cx_cli.dataset_dir,
                     "pull n and |A|_0 from a dataset");
  cx_cmd->add_option("--layers", cx_cli.layers, "GCN depth");
  cx_cmd->add_option("--hidden", cx_cli.hidden, "hidden width");
  cx_cmd->add_option("--nodes", cx_cli.nodes, "node count");
  cx_cmd->add_option("--edges", cx_cli.edges, "undirected edge count");
  cx_cmd->add_option("--batch", cx_cli.batch, "batch size");
  cx_cmd->add_option("--s-node", cx_cli.s_node, "neighbors per node");
  cx_cmd->add_option("--s-layer", cx_cli.s_layer, "nodes per layer");
  cx_cmd->add_option("--out", cx_cli.out, "output path");
  cx_cmd->add_option("--format", cx_cli.format, "json|text");

  GenDataCli gen_cli;
  CLI::App* gen_cmd =
      app.add_subcommand("gen-data", "Generate a synthetic dataset directory");
  gen_cmd->add_option("--out", gen_cli.out_dir, "output directory")->required();
  gen_cmd->add_option("--kind", gen_cli.kind, "er|sbm|star|path|grid");
  gen_cmd->add_option("--nodes", gen_cli.nodes, "node count");
  gen_cmd->add_option("--er-p", gen_cli.er_p, "ER edge probability");
  gen_cmd->add_option("--blocks", gen_cli.blocks, "SBM block count");
  gen_cmd->add_option("--p-in", gen_cli.p_in, "SBM within-block probability");
  gen_cmd->add_option("--p-out", gen_cli.p_out, "SBM cross-block probability");
  gen_cmd->add_option("--grid-rows", gen_cli.grid_rows, "grid rows");
  gen_cmd->add_option("--grid-cols", gen_cli.grid_cols, "grid cols");
  gen_cmd->add_option("--features", gen_cli.features, "onehot|gaussian");
  gen_cmd->add_option("--feature-dim", gen_cli.feature_dim, "gaussian width");
  gen_cmd->add_option("--noise", gen_cli.noise, "gaussian feature noise");
  gen_cmd->add_option("--classes", gen_cli.classes, "label count (non-SBM)");
  gen_cmd->add_option("--seed", gen_cli.seed, "rng seed");
  gen_cmd->add_option("--config", gen_cli.config_file,
                      "key=value file overriding the flags");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train_cmd->parsed()) return run_train(train_cli);
    if (bench_cmd->parsed()) return run_benchmark(bench_cli);
    if (var_cmd->parsed()) return run_variance(var_cli);
    if (cx_cmd->parsed()) return run_complexity(cx_cli);
    if (gen_cmd->parsed()) return run_gen_data(gen_cli);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
