#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include "blindcen/filters.hpp"
#include "blindcen/graph.hpp"
#include "blindcen/ingest.hpp"
#include "blindcen/rng.hpp"
#include "blindcen/signals.hpp"

using namespace blindcen;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("blindcen_ingest_" + name);
}

std::string write_fixture(const std::string& name, const std::string& text) {
  const auto p = temp_file(name);
  std::ofstream f(p, std::ios::binary);
  f << text;
  return p.string();
}

const std::string kReturns3 =
    "date,A,B\n"
    "2020-01-02,2,6\n"
    "2020-01-01,1,4\n"  // out of order on purpose: loader sorts by date
    "2020-01-03,3,8\n";

const std::string kDrivers3 =
    "date,d1\n"
    "2020-01-01,10\n"
    "2020-01-02,20\n"
    "2020-01-03,30\n";

}  // namespace

TEST_CASE("panel loads, joins on dates, and sorts them ascending") {
  const auto ry = write_fixture("happy_y.csv", kReturns3);
  const auto rz = write_fixture("happy_z.csv", kDrivers3);
  const AlignedPanel panel = load_panel(ry, rz);

  CHECK(panel.entity_labels == std::vector<std::string>{"A", "B"});
  CHECK(panel.driver_labels == std::vector<std::string>{"d1"});
  CHECK(panel.dates ==
        std::vector<std::string>{"2020-01-01", "2020-01-02", "2020-01-03"});
  CHECK(panel.n() == 2);
  CHECK(panel.k() == 1);
  CHECK(panel.m() == 3);
  CHECK(panel.preprocessing.dropped_dates == 0);
  CHECK(panel.preprocessing.steps.size() == 2);  // centering + standardizing
}

TEST_CASE("default preprocessing centers returns and standardizes drivers") {
  const auto ry = write_fixture("std_y.csv", kReturns3);
  const auto rz = write_fixture("std_z.csv", kDrivers3);
  const AlignedPanel panel = load_panel(ry, rz);

  // Raw rows (date-sorted): A = [1,2,3], B = [4,6,8], d1 = [10,20,30].
  Eigen::VectorXd a_row = panel.Y.row(0), b_row = panel.Y.row(1);
  CHECK(a_row(0) == -1.0);
  CHECK(a_row(1) == 0.0);
  CHECK(a_row(2) == 1.0);
  CHECK(b_row(0) == -2.0);
  CHECK(b_row(2) == 2.0);

  // d1: mean 20, sample variance (n-1 denominator) 100, scale 10.
  CHECK(panel.Z(0, 0) == -1.0);
  CHECK(panel.Z(0, 1) == 0.0);
  CHECK(panel.Z(0, 2) == 1.0);

  CHECK(panel.preprocessing.return_means(0) == 2.0);
  CHECK(panel.preprocessing.return_means(1) == 6.0);
  CHECK(panel.preprocessing.driver_means(0) == 20.0);
  CHECK(panel.preprocessing.driver_scales(0) == 10.0);
}

TEST_CASE("the preprocess record reproduces the processed matrices bit-exactly") {
  const auto ry = write_fixture("rec_y.csv", kReturns3);
  const auto rz = write_fixture("rec_z.csv", kDrivers3);
  const AlignedPanel panel = load_panel(ry, rz);

  Eigen::MatrixXd raw_y(2, 3), raw_z(1, 3);
  raw_y << 1, 2, 3, 4, 6, 8;
  raw_z << 10, 20, 30;
  const auto [y, z] = apply_preprocessing(raw_y, raw_z, panel.preprocessing);
  CHECK((y - panel.Y).cwiseAbs().maxCoeff() == 0.0);
  CHECK((z - panel.Z).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("dates missing from one file are skipped; incomplete ones dropped") {
  const auto ry = write_fixture("join_y.csv",
                                "date,A\n"
                                "2020-01-01,1\n"
                                "2020-01-02,\n"
                                "2020-01-03,3\n"
                                "2020-01-04,4\n");
  const auto rz = write_fixture("join_z.csv",
                                "date,d\n"
                                "2020-01-01,5\n"
                                "2020-01-02,6\n"
                                "2020-01-03,\n"
                                "2020-01-05,9\n");
  PreprocessOptions opts;
  opts.center_returns = false;
  opts.standardize_drivers = false;
  const AlignedPanel panel = load_panel(ry, rz, opts);
  // Common dates: 01 (complete), 02 (empty in returns), 03 (empty in
  // drivers). 04/05 appear in only one file and are skipped silently.
  CHECK(panel.dates == std::vector<std::string>{"2020-01-01"});
  CHECK(panel.preprocessing.dropped_dates == 2);
  CHECK(panel.Y(0, 0) == 1.0);
  CHECK(panel.Z(0, 0) == 5.0);
  CHECK(panel.preprocessing.steps.empty());
}

TEST_CASE("whitening gives the drivers an identity sample covariance") {
  // Two strongly correlated drivers over six dates.
  const auto ry = write_fixture("white_y.csv",
                                "date,A\n"
                                "d1,0.1\nd2,0.2\nd3,-0.1\nd4,0.3\nd5,0.0\nd6,-0.2\n");
  const auto rz = write_fixture("white_z.csv",
                                "date,u,v\n"
                                "d1,1.0,2.1\n"
                                "d2,2.0,4.0\n"
                                "d3,3.0,5.9\n"
                                "d4,4.0,8.2\n"
                                "d5,5.0,9.8\n"
                                "d6,6.0,12.1\n");
  PreprocessOptions opts;
  opts.whiten_drivers = true;
  const AlignedPanel panel = load_panel(ry, rz, opts);

  CHECK(panel.preprocessing.whiten_drivers);
  CHECK(!panel.preprocessing.standardize_drivers);  // overridden
  const int m = panel.m();
  const Eigen::MatrixXd cov =
      panel.Z * panel.Z.transpose() / static_cast<double>(m - 1);
  CHECK((cov - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(panel.Z.rowwise().mean().cwiseAbs().maxCoeff() < 1e-12);

  // The record replays whitening exactly too.
  Eigen::MatrixXd raw_y(1, 6), raw_z(2, 6);
  raw_y << 0.1, 0.2, -0.1, 0.3, 0.0, -0.2;
  raw_z << 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 2.1, 4.0, 5.9, 8.2, 9.8, 12.1;
  const auto [y, z] = apply_preprocessing(raw_y, raw_z, panel.preprocessing);
  CHECK((y - panel.Y).cwiseAbs().maxCoeff() == 0.0);
  CHECK((z - panel.Z).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("constant drivers are rejected when standardizing") {
  const auto ry = write_fixture("const_y.csv", kReturns3);
  const auto rz = write_fixture("const_z.csv",
                                "date,flat\n"
                                "2020-01-01,7\n"
                                "2020-01-02,7\n"
                                "2020-01-03,7\n");
  CHECK_THROWS_WITH_AS(load_panel(ry, rz),
                       doctest::Contains("degenerate driver 'flat'"),
                       std::runtime_error);
}

TEST_CASE("single-date panels cannot be standardized but load raw") {
  const auto ry = write_fixture("m1_y.csv", "date,A\n2020-01-01,1\n");
  const auto rz = write_fixture("m1_z.csv", "date,d\n2020-01-01,5\n");
  CHECK_THROWS_WITH_AS(load_panel(ry, rz),
                       doctest::Contains("fewer than 2 dates"),
                       std::runtime_error);

  PreprocessOptions opts;
  opts.standardize_drivers = false;
  opts.center_returns = false;
  const AlignedPanel panel = load_panel(ry, rz, opts);
  CHECK(panel.m() == 1);
  CHECK(panel.Y(0, 0) == 1.0);
}

TEST_CASE("disjoint date axes are an alignment error") {
  const auto ry = write_fixture("disj_y.csv", "date,A\n2020-01-01,1\n");
  const auto rz = write_fixture("disj_z.csv", "date,d\n2021-01-01,5\n");
  CHECK_THROWS_WITH_AS(load_panel(ry, rz), doctest::Contains("alignment error"),
                       std::runtime_error);
}

TEST_CASE("header problems are reported with the offending file and line") {
  const auto rz = write_fixture("hdr_z.csv", kDrivers3);

  const auto no_date =
      write_fixture("hdr_nodate.csv", "time,A\n2020-01-01,1\n");
  CHECK_THROWS_WITH_AS(load_panel(no_date, rz),
                       doctest::Contains("must start with a 'date' column"),
                       std::runtime_error);

  const auto no_cols = write_fixture("hdr_nocols.csv", "date\n2020-01-01\n");
  CHECK_THROWS_WITH_AS(load_panel(no_cols, rz),
                       doctest::Contains("no data columns"),
                       std::runtime_error);

  const auto dup = write_fixture("hdr_dup.csv", "date,A,A\n2020-01-01,1,2\n");
  CHECK_THROWS_WITH_AS(load_panel(dup, rz),
                       doctest::Contains("duplicate column label 'A'"),
                       std::runtime_error);

  const auto empty_label =
      write_fixture("hdr_empty.csv", "date,A,\n2020-01-01,1,2\n");
  CHECK_THROWS_WITH_AS(load_panel(empty_label, rz),
                       doctest::Contains("empty label"), std::runtime_error);
}

TEST_CASE("row problems are reported with file, line, and column context") {
  const auto rz = write_fixture("row_z.csv", kDrivers3);

  const auto dup_date = write_fixture(
      "row_dupdate.csv", "date,A\n2020-01-01,1\n2020-01-01,2\n");
  CHECK_THROWS_WITH_AS(load_panel(dup_date, rz),
                       doctest::Contains("duplicate date '2020-01-01'"),
                       std::runtime_error);

  const auto ragged =
      write_fixture("row_ragged.csv", "date,A,B\n2020-01-01,1\n");
  try {
    load_panel(ragged, rz);
    FAIL("expected a field-count error");
  } catch (const std::runtime_error& e) {
    const std::string msg = e.what();
    CHECK(msg.find(":2: expected 3 fields, got 2") != std::string::npos);
  }

  const auto bad_cell = write_fixture(
      "row_badcell.csv", "date,A,B\n2020-01-01,1,oops\n");
  try {
    load_panel(bad_cell, rz);
    FAIL("expected a parse error");
  } catch (const std::runtime_error& e) {
    const std::string msg = e.what();
    CHECK(msg.find(":2: column 3 ('B'): not a number: 'oops'") !=
          std::string::npos);
  }

  const auto empty_date =
      write_fixture("row_emptydate.csv", "date,A\n,1\n");
  CHECK_THROWS_WITH_AS(load_panel(empty_date, rz),
                       doctest::Contains("empty date cell"),
                       std::runtime_error);

  const auto headers_only = write_fixture("row_none.csv", "date,A\n");
  CHECK_THROWS_WITH_AS(load_panel(headers_only, rz),
                       doctest::Contains("no data rows"), std::runtime_error);
}

TEST_CASE("real pipeline reports all three estimates and ranked influence") {
  // Build a panel in memory from the synthetic generator: 12 entities
  // driven by 3 latent series through a filtered influence map.
  Graph g = generate_sbm_core_periphery(12, 3, 0.15, 7);
  std::uint64_t bump = 0;
  while (!is_connected(g))
    g = generate_sbm_core_periphery(12, 3, 0.15, 7 + 1000 * ++bump);
  const SpectralDecomposition sd = spectral_decompose(g);
  const InfluenceMatrix b =
      generate_influence(SparsityPattern::per_row_3_6, 12, 6, 3);
  const Eigen::MatrixXd z = sample_latents(6, 80, 4);
  const SignalDataset ds =
      synthesize(IirFilter{0.6 / sd.eigenvalues[0]}, sd, b, z);

  AlignedPanel panel;
  for (int i = 0; i < 12; ++i)
    panel.entity_labels.push_back("e" + std::to_string(i));
  for (int j = 0; j < 6; ++j)
    panel.driver_labels.push_back("d" + std::to_string(j));
  for (int t = 0; t < 80; ++t)
    panel.dates.push_back("t" + std::to_string(t));
  panel.Y = ds.Y;
  panel.Z = ds.Z;

  const SolverConfig cfg = SolverConfig::scaled_defaults(6);
  const RealReport rep = run_real_pipeline(panel, cfg, 5);

  CHECK(rep.pca.method == Method::pca);
  CHECK(rep.robust.method == Method::robust);
  CHECK(rep.robust_quantized.method == Method::robust_quantized);
  CHECK(rep.pca.scores.size() == 12);
  CHECK(rep.robust.scores.size() == 12);
  CHECK(rep.hb.matrix.rows() == 12);
  CHECK(rep.hb.matrix.cols() == 6);
  CHECK(rep.beta_used == cfg.beta);

  const Eigen::MatrixXd scaled =
      threshold_sparse(rep.decomposition.S_hat, cfg.beta) / cfg.beta;
  REQUIRE(rep.influence.size() == 6);
  for (int j = 0; j < 6; ++j) {
    const auto& list = rep.influence[static_cast<std::size_t>(j)];
    REQUIRE(list.size() == 5);
    double max_col = scaled.col(j).maxCoeff();
    CHECK(list[0].weight == max_col);
    for (std::size_t t = 0; t < list.size(); ++t) {
      const InfluenceEntry& e = list[t];
      CHECK(e.weight == scaled(e.entity_index, j));
      CHECK(e.entity ==
            panel.entity_labels[static_cast<std::size_t>(e.entity_index)]);
      if (t > 0) CHECK(list[t - 1].weight >= e.weight);
    }
  }

  CHECK_THROWS_AS(run_real_pipeline(panel, cfg, 0), std::invalid_argument);

  AlignedPanel thin = panel;
  thin.Y = panel.Y.leftCols(4);
  thin.Z = panel.Z.leftCols(4);  // m = 4 < k = 6
  CHECK_THROWS_AS(run_real_pipeline(thin, cfg), std::invalid_argument);
}
