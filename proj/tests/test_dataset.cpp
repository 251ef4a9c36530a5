#include "ladies/dataset.hpp"

#include "doctest.h"
#include "oracles.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

using namespace ladies;

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name)
      : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Dataset tiny_fixture() {
  Dataset d;
  d.graph = build_graph({{0, 1}}, 2);
  d.features.resize(2, 3);
  d.features << 1.0, 0.0, 0.25, 0.0, 2.0, 0.5;
  d.labels = {0, 1};
  d.train_idx = {0};
  d.val_idx = {1};
  d.test_idx = {};
  return d;
}

}  // namespace

TEST_CASE("minimal fixture round-trips through save and load") {
  TempDir dir("ladies_ds_roundtrip");
  Dataset d = tiny_fixture();
  d.test_idx = {};
  d.val_idx = {1};
  save_dataset(d, dir.path.string());

  LoadOptions opts;
  opts.normalize_features = false;
  const Dataset loaded = load_dataset(dir.path.string(), opts);
  CHECK(loaded.graph.row_ptr == d.graph.row_ptr);
  CHECK(loaded.graph.col_idx == d.graph.col_idx);
  CHECK((loaded.features - d.features).cwiseAbs().maxCoeff() == 0.0);
  CHECK(loaded.labels == d.labels);
  CHECK(loaded.train_idx == d.train_idx);

  // write(load(dir)) is byte-identical for canonical fixtures.
  TempDir dir2("ladies_ds_roundtrip2");
  save_dataset(loaded, dir2.path.string());
  for (const char* name :
       {"graph.txt", "features.txt", "labels.txt", "splits.txt"}) {
    CHECK(slurp(dir.path / name) == slurp(dir2.path / name));
  }
}

TEST_CASE("feature normalization is on by default") {
  TempDir dir("ladies_ds_norm");
  save_dataset(tiny_fixture(), dir.path.string());
  const Dataset loaded = load_dataset(dir.path.string());
  for (Index i = 0; i < loaded.features.rows(); ++i) {
    CHECK(loaded.features.row(i).cwiseAbs().sum() ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("overlapping splits are rejected") {
  TempDir dir("ladies_ds_overlap");
  Dataset d = tiny_fixture();
  save_dataset(d, dir.path.string());
  {
    std::ofstream out(dir.path / "splits.txt");
    out << "0 1\n1\n\n";  // node 1 in both train and val
  }
  CHECK_THROWS_WITH_AS(load_dataset(dir.path.string()),
                       doctest::Contains("overlap"), std::invalid_argument);
}

TEST_CASE("malformed header names the file") {
  TempDir dir("ladies_ds_badheader");
  save_dataset(tiny_fixture(), dir.path.string());
  {
    std::ofstream out(dir.path / "graph.txt");
    out << "abc\n";
  }
  CHECK_THROWS_WITH_AS(load_dataset(dir.path.string()),
                       doctest::Contains("graph.txt"), std::runtime_error);
}

TEST_CASE("out-of-range edge endpoint names file and line") {
  TempDir dir("ladies_ds_badedge");
  save_dataset(tiny_fixture(), dir.path.string());
  {
    std::ofstream out(dir.path / "graph.txt");
    out << "2 1\n0 7\n";
  }
  CHECK_THROWS_WITH_AS(load_dataset(dir.path.string()),
                       doctest::Contains("graph.txt:2"), std::runtime_error);
}

TEST_CASE("erdos-renyi extremes") {
  Rng rng(40);
  SyntheticSpec spec;
  spec.kind = SyntheticSpec::Kind::kErdosRenyi;
  spec.num_nodes = 100;
  spec.er_p = 0.0;
  spec.features = SyntheticSpec::Features::kGaussian;
  CHECK(generate(spec, rng).graph.nnz() == 0);

  spec.er_p = 1.0;
  Rng rng2(41);
  CHECK(generate(spec, rng2).graph.nnz() == 100 * 99);
}

TEST_CASE("sbm intra-block edge count is within 3 sigma of its mean") {
  SyntheticSpec spec;
  spec.kind = SyntheticSpec::Kind::kSbm;
  spec.num_nodes = 100;
  spec.sbm_blocks = 2;
  spec.sbm_p_in = 0.2;
  spec.sbm_p_out = 0.01;
  spec.features = SyntheticSpec::Features::kGaussian;
  Rng rng(42);
  const Dataset d = generate(spec, rng);

  long intra = 0;
  for (Index u = 0; u < d.graph.num_nodes; ++u) {
    for (Index v : d.graph.neighbors(u)) {
      if (u < v && d.labels[static_cast<size_t>(u)] ==
                       d.labels[static_cast<size_t>(v)]) {
        ++intra;
      }
    }
  }
  const double pairs_in = 2.0 * (50.0 * 49.0 / 2.0);
  const double mean = pairs_in * 0.2;
  const double sigma = std::sqrt(pairs_in * 0.2 * 0.8);
  CHECK(std::abs(static_cast<double>(intra) - mean) <= 3.0 * sigma);
}

TEST_CASE("generated datasets pass validation and are seed-deterministic") {
  for (auto kind : {SyntheticSpec::Kind::kErdosRenyi, SyntheticSpec::Kind::kSbm,
                    SyntheticSpec::Kind::kStar, SyntheticSpec::Kind::kPath}) {
    SyntheticSpec spec;
    spec.kind = kind;
    spec.num_nodes = 40;
    spec.er_p = 0.1;
    spec.sbm_p_in = 0.3;
    spec.sbm_p_out = 0.02;
    spec.features = SyntheticSpec::Features::kGaussian;
    Rng a(7), b(7);
    const Dataset da = generate(spec, a);
    const Dataset db = generate(spec, b);
    CHECK_NOTHROW(validate_dataset(da));
    CHECK(da.graph.col_idx == db.graph.col_idx);
    CHECK((da.features - db.features).cwiseAbs().maxCoeff() == 0.0);
    CHECK(da.train_idx == db.train_idx);
  }
  SyntheticSpec grid;
  grid.kind = SyntheticSpec::Kind::kGrid;
  grid.grid_rows = 5;
  grid.grid_cols = 8;
  grid.features = SyntheticSpec::Features::kGaussian;
  Rng g(8);
  const Dataset dg = generate(grid, g);
  CHECK(dg.graph.num_nodes == 40);
  CHECK_NOTHROW(validate_dataset(dg));
}

TEST_CASE("degree stats") {
  SUBCASE("star: average degree 2k/(k+1)") {
    const SparseGraph g = build_graph({{0, 1}, {0, 2}, {0, 3}, {0, 4}}, 5);
    const DegreeStats s = degree_stats(g);
    CHECK(s.average_degree == doctest::Approx(2.0 * 4.0 / 5.0));
    CHECK(s.max_degree == 4);
  }
  SUBCASE("path graph exact values") {
    const SparseGraph g = build_graph({{0, 1}, {1, 2}}, 3);
    const DegreeStats s = degree_stats(g);
    CHECK(s.average_degree == doctest::Approx(4.0 / 3.0));
    CHECK(s.max_degree == 2);
  }
}

TEST_CASE("candidate-set size estimators") {
  Rng setup(50);
  const SparseGraph g = build_graph(oracle::random_edges(60, 0.05, setup), 60);

  SUBCASE("exact expectation matches the Monte-Carlo estimator") {
    for (Index b : {1, 4, 16}) {
      const double exact = average_candidate_size(g, b);
      Rng rng(51);
      const double mc = estimate_candidate_size(g, b, 4000, rng);
      CHECK(std::abs(exact - mc) / exact < 0.05);
    }
  }
  SUBCASE("bounded by b*(D+1)") {
    const DegreeStats s = degree_stats(g);
    for (Index b = 1; b <= 30; ++b) {
      CHECK(average_candidate_size(g, b) <=
            static_cast<double>(b) * (s.average_degree + 1.0) + 1e-9);
    }
  }
  SUBCASE("monotone non-decreasing in b") {
    Rng rng(52);
    const auto curve = candidate_size_curve(g, 30, 200, rng);
    for (size_t i = 1; i < curve.size(); ++i) {
      CHECK(curve[i] >= curve[i - 1]);
    }
    // The exact expectation is monotone as well.
    double prev = 0.0;
    for (Index b = 1; b <= 30; ++b) {
      const double cur = average_candidate_size(g, b);
      CHECK(cur >= prev);
      prev = cur;
    }
  }
}
