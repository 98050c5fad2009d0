#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "dimple/simulate.hpp"
#include "doctest.h"
#include "test_util.hpp"

namespace fs = std::filesystem;

using dimple::ExperimentGrid;
using dimple::GridResult;
using dimple::ModelKind;
using dimple::SweepAxis;

namespace {

fs::path write_grid_file(const std::string& name, const std::string& content) {
  const fs::path p = fs::temp_directory_path() / ("dimple_grid_" + name + ".txt");
  std::ofstream out(p);
  REQUIRE(out.good());
  out << content;
  out.close();
  return p;
}

ExperimentGrid tiny_grid() {
  ExperimentGrid g;
  g.model = ModelKind::block;
  g.base = testutil::small_config(5, 18, 6, 2, 2);
  g.base.edge_lo = 0.1;
  g.axis = SweepAxis::nodes;
  g.values = {12.0, 18.0};
  g.replicates = 3;
  g.seed = 99;
  g.metrics = {"r_bl", "r_wl"};
  return g;
}

}  // namespace

TEST_CASE("load_grid parses every key") {
  const auto p = write_grid_file("ok",
                                 "# sweep description\n"
                                 "format dimple-grid 1\n"
                                 "model dimple\n"
                                 "axis L\n"
                                 "values 10 50 100\n"
                                 "replicates 7\n"
                                 "seed 123\n"
                                 "n 100\n"
                                 "L 50\n"
                                 "M 3\n"
                                 "K 3\n"
                                 "c 0\n"
                                 "d 0.8\n"
                                 "w 1\n"
                                 "alpha 0.1\n"
                                 "metrics r_bl r_wl\n");
  const ExperimentGrid g = dimple::load_grid(p.string());
  CHECK(g.model == ModelKind::block);
  CHECK(g.axis == SweepAxis::layers);
  CHECK(g.values == std::vector<double>{10.0, 50.0, 100.0});
  CHECK(g.replicates == 7);
  CHECK(g.seed == 123);
  CHECK(g.base.n == 100);
  CHECK(g.base.L == 50);
  CHECK(g.base.M == 3);
  CHECK(g.base.K == std::vector<Eigen::Index>{3});
  CHECK(g.base.edge_lo == 0.0);
  CHECK(g.base.edge_hi == 0.8);
  CHECK(g.base.offdiag_scale == 1.0);
  CHECK(g.base.dirichlet_alpha == 0.1);
  CHECK(g.metrics == std::vector<std::string>{"r_bl", "r_wl"});
  CHECK_FALSE(g.noiseless);
}

TEST_CASE("load_grid rejects malformed descriptions") {
  auto bad = [](const std::string& name, const std::string& content) {
    const auto p = write_grid_file(name, content);
    CHECK_THROWS_AS(dimple::load_grid(p.string()), dimple::data_error);
  };
  const std::string head =
      "format dimple-grid 1\nmodel dimple\naxis n\nvalues 20\nreplicates 2\nseed 1\n"
      "L 4\nM 2\nK 2\nc 0.1\nd 0.6\n";
  bad("unknown_key", head + "n 20\nbogus 3\nmetrics r_bl\n");
  bad("bad_axis",
      "format dimple-grid 1\nmodel dimple\naxis sideways\nvalues 20\nreplicates 2\nseed 1\n"
      "n 20\nL 4\nM 2\nK 2\nc 0.1\nd 0.6\nmetrics r_bl\n");
  bad("bad_metric", head + "n 20\nmetrics r_bogus\n");
  // community error is undefined for the latent-position model
  bad("rwl_gdpg",
      "format dimple-grid 1\nmodel gdpg\naxis n\nvalues 20\nreplicates 2\nseed 1\n"
      "n 20\nL 4\nM 2\nK 2\nc 0.1\nd 0.6\nalpha 0.1\nmetrics r_wl\n");
  // fractional node counts are meaningless
  bad("frac_nodes",
      "format dimple-grid 1\nmodel dimple\naxis n\nvalues 20.5\nreplicates 2\nseed 1\n"
      "n 20\nL 4\nM 2\nK 2\nc 0.1\nd 0.6\nmetrics r_bl\n");
  bad("missing_values",
      "format dimple-grid 1\nmodel dimple\naxis n\nreplicates 2\nseed 1\n"
      "n 20\nL 4\nM 2\nK 2\nc 0.1\nd 0.6\nmetrics r_bl\n");
  CHECK_THROWS_AS(dimple::load_grid("/nonexistent/grid.txt"), dimple::data_error);
}

TEST_CASE("run_grid produces one cell per value and metric, in grid order") {
  const ExperimentGrid g = tiny_grid();
  const GridResult r = dimple::run_grid(g, 1);
  REQUIRE(r.cells.size() == 4);
  CHECK(r.cells[0].value == 12.0);
  CHECK(r.cells[0].metric == "r_bl");
  CHECK(r.cells[1].value == 12.0);
  CHECK(r.cells[1].metric == "r_wl");
  CHECK(r.cells[2].value == 18.0);
  CHECK(r.cells[3].value == 18.0);
  for (const auto& c : r.cells) {
    CHECK(c.replicates == 3);
    CHECK(c.failed == 0);
    CHECK(c.mean >= 0.0);
    CHECK(c.mean <= 1.0);
    CHECK(c.stddev >= 0.0);
  }
}

TEST_CASE("run_grid is bit-identical across worker counts") {
  const ExperimentGrid g = tiny_grid();
  const GridResult a = dimple::run_grid(g, 1);
  const GridResult b = dimple::run_grid(g, 2);
  const GridResult c = dimple::run_grid(g, 8);
  REQUIRE(a.cells.size() == b.cells.size());
  REQUIRE(a.cells.size() == c.cells.size());
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    CHECK(a.cells[i].mean == b.cells[i].mean);
    CHECK(a.cells[i].stddev == b.cells[i].stddev);
    CHECK(a.cells[i].mean == c.cells[i].mean);
    CHECK(a.cells[i].stddev == c.cells[i].stddev);
    CHECK(a.cells[i].failed == c.cells[i].failed);
  }
  CHECK(dimple::grid_csv(a, g) == dimple::grid_csv(c, g));
}

TEST_CASE("noiseless sweeps recover the truth exactly") {
  ExperimentGrid g = tiny_grid();
  g.noiseless = true;
  g.metrics = {"r_bl", "r_wl", "r_s_ave"};
  const GridResult r = dimple::run_grid(g, 1);
  for (const auto& c : r.cells) {
    CHECK(c.failed == 0);
    if (c.metric == "r_s_ave") {
      CHECK(c.mean <= 1e-10);
    } else {
      CHECK(c.mean == 0.0);
      CHECK(c.stddev == 0.0);
    }
  }
}

TEST_CASE("replicates that cannot be fit are counted, not aggregated") {
  ExperimentGrid g = tiny_grid();
  // zero connection strengths give empty layers, which the spectral pipeline
  // rejects with a numeric error
  g.base.edge_lo = 0.0;
  g.base.edge_hi = 0.0;
  g.values = {12.0};
  g.metrics = {"r_bl"};
  const GridResult r = dimple::run_grid(g, 1);
  REQUIRE(r.cells.size() == 1);
  CHECK(r.cells[0].failed == 3);
  CHECK(std::isnan(r.cells[0].mean));
  CHECK(std::isnan(r.cells[0].stddev));

  // the CSV still carries the row, with nan fields
  const std::string csv = dimple::grid_csv(r, g);
  CHECK(csv.find("nan") != std::string::npos);
}

TEST_CASE("grid results depend on the seed") {
  ExperimentGrid g = tiny_grid();
  g.values = {14.0};
  g.metrics = {"r_s_ave"};  // continuous-valued, so ties would be a real bug
  g.replicates = 4;
  const GridResult a = dimple::run_grid(g, 1);
  g.seed += 1;
  const GridResult b = dimple::run_grid(g, 1);
  CHECK(a.cells[0].mean != b.cells[0].mean);
}

TEST_CASE("grid_csv is deterministic and well formed") {
  const ExperimentGrid g = tiny_grid();
  const GridResult r = dimple::run_grid(g, 1);
  const std::string csv = dimple::grid_csv(r, g);
  CHECK(csv.find("model,axis,value,metric,mean,std,replicates,failed\n") == 0);
  CHECK(csv.find("dimple,n,12,r_bl,") != std::string::npos);
  CHECK(csv.find("dimple,n,18,r_wl,") != std::string::npos);
  // one header plus one line per cell
  const auto lines = static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n'));
  CHECK(lines == 1 + r.cells.size());
}

TEST_CASE("grid validation rejects inconsistent settings") {
  ExperimentGrid g = tiny_grid();
  g.values.clear();
  CHECK_THROWS_AS(g.validate(), dimple::config_error);
  g = tiny_grid();
  g.replicates = 0;
  CHECK_THROWS_AS(g.validate(), dimple::config_error);
  g = tiny_grid();
  g.metrics = {"r_wl"};
  g.model = ModelKind::gdpg;
  CHECK_THROWS_AS(g.validate(), dimple::config_error);
  g = tiny_grid();
  g.axis = SweepAxis::strength;
  g.values = {1.4};  // would push connection strengths past one
  CHECK_THROWS_AS(g.validate(), dimple::config_error);
  g = tiny_grid();
  g.axis = SweepAxis::layers;
  g.values = {1.0};  // fewer layers than groups
  CHECK_THROWS_AS(g.validate(), dimple::config_error);
}

TEST_CASE("axis names match the file vocabulary") {
  CHECK(dimple::axis_name(SweepAxis::nodes) == "n");
  CHECK(dimple::axis_name(SweepAxis::layers) == "L");
  CHECK(dimple::axis_name(SweepAxis::strength) == "w");
}
