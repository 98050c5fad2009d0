#include "dimple/simulate.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <thread>

#include "dimple/fit.hpp"
#include "dimple/generate.hpp"
#include "dimple/io.hpp"
#include "dimple/metrics.hpp"
#include "dimple/rng.hpp"
#include "text_format.hpp"

namespace dimple {

namespace {

const std::set<std::string> kKnownMetrics = {"r_bl", "r_wl", "r_s_ave", "r_s_max"};

double extract_metric(const ErrorReport& report, const std::string& metric) {
  if (metric == "r_bl") return report.r_bl;
  if (metric == "r_wl") {
    require_numeric(report.r_wl.has_value(), "simulate: fit produced no r_wl");
    return *report.r_wl;
  }
  if (metric == "r_s_ave") {
    require_numeric(report.r_s_ave.has_value(), "simulate: fit produced no r_s_ave");
    return *report.r_s_ave;
  }
  require_numeric(report.r_s_max.has_value(), "simulate: fit produced no r_s_max");
  return *report.r_s_max;
}

DimpleConfig config_for_value(const ExperimentGrid& grid, double value) {
  DimpleConfig cfg = grid.base;
  switch (grid.axis) {
    case SweepAxis::nodes:
      cfg.n = static_cast<Eigen::Index>(std::llround(value));
      break;
    case SweepAxis::layers:
      cfg.L = static_cast<Eigen::Index>(std::llround(value));
      break;
    case SweepAxis::strength:
      cfg.offdiag_scale = value;
      break;
  }
  return cfg;
}

// one generate -> sample -> fit -> score pass; returns one value per metric
std::vector<double> run_replicate(const ExperimentGrid& grid, std::size_t value_index,
                                  int replicate) {
  DimpleConfig cfg = config_for_value(grid, grid.values[value_index]);
  cfg.seed = derive_seed(grid.seed, {kGridStream, static_cast<std::uint64_t>(value_index),
                                     static_cast<std::uint64_t>(replicate), 1});
  const std::uint64_t sample_seed =
      derive_seed(grid.seed, {kGridStream, static_cast<std::uint64_t>(value_index),
                              static_cast<std::uint64_t>(replicate), 2});
  const std::uint64_t fit_seed =
      derive_seed(grid.seed, {kGridStream, static_cast<std::uint64_t>(value_index),
                              static_cast<std::uint64_t>(replicate), 3});

  const GroundTruth truth = grid.model == ModelKind::block ? generate_block_truth(cfg)
                                                           : generate_gdpg_truth(cfg);
  FitOptions opt;
  opt.subspaces_only = grid.model == ModelKind::gdpg;
  FitResult fit;
  if (grid.noiseless) {
    opt.exact_squares = true;
    std::vector<Eigen::Index> ambient;
    for (int z : truth.layer_labels) {
      ambient.push_back(truth.group_dims[static_cast<std::size_t>(z)]);
    }
    fit = fit_layers(truth.probabilities.layers, ambient, static_cast<int>(truth.num_groups),
                     truth.group_dims, opt, fit_seed);
  } else {
    const MultiplexNetwork net = sample_adjacency(truth, sample_seed);
    fit = fit_multiplex(net, static_cast<int>(truth.num_groups), truth.group_dims, opt, fit_seed);
  }
  const ErrorReport report = score_fit(fit, truth);

  std::vector<double> out;
  out.reserve(grid.metrics.size());
  for (const auto& metric : grid.metrics) out.push_back(extract_metric(report, metric));
  return out;
}

}  // namespace

void ExperimentGrid::validate() const {
  base.validate(model);
  require_config(!values.empty(), "grid: no sweep values");
  require_config(replicates >= 1, "grid: need at least one replicate");
  require_config(!metrics.empty(), "grid: no metrics requested");
  for (const auto& metric : metrics) {
    require_config(kKnownMetrics.count(metric) == 1, "grid: unknown metric '" + metric + "'");
    require_config(metric != "r_wl" || model == ModelKind::block,
                   "grid: r_wl requires the block model");
  }
  for (double v : values) {
    switch (axis) {
      case SweepAxis::nodes:
      case SweepAxis::layers: {
        const double r = std::llround(v);
        require_config(v == r && r >= 1.0, "grid: node/layer sweep values must be positive integers");
        break;
      }
      case SweepAxis::strength:
        require_config(v >= 0.0, "grid: strength sweep values must be non-negative");
        break;
    }
    config_for_value(*this, v).validate(model);
  }
}

GridResult run_grid(const ExperimentGrid& grid, int workers) {
  grid.validate();
  require_config(workers >= 1, "run_grid: need at least one worker");

  const std::size_t nvals = grid.values.size();
  const int reps = grid.replicates;
  const std::size_t tasks = nvals * static_cast<std::size_t>(reps);

  // per-replicate results land in preallocated slots so aggregation order is
  // fixed no matter which worker ran which replicate
  std::vector<std::vector<double>> results(tasks);
  std::vector<char> failed(tasks, 0);

  std::atomic<std::size_t> next{0};
  auto body = [&]() {
    for (;;) {
      const std::size_t t = next.fetch_add(1);
      if (t >= tasks) return;
      const std::size_t vi = t / static_cast<std::size_t>(reps);
      const int r = static_cast<int>(t % static_cast<std::size_t>(reps));
      try {
        results[t] = run_replicate(grid, vi, r);
      } catch (const std::exception&) {
        failed[t] = 1;
      }
    }
  };
  if (workers == 1) {
    body();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& th : pool) th.join();
  }

  GridResult out;
  for (std::size_t vi = 0; vi < nvals; ++vi) {
    for (std::size_t mi = 0; mi < grid.metrics.size(); ++mi) {
      GridCell cell;
      cell.value = grid.values[vi];
      cell.metric = grid.metrics[mi];
      cell.replicates = reps;
      // fixed reduction order: replicate 0, 1, 2, ...
      double sum = 0.0;
      int ok = 0;
      for (int r = 0; r < reps; ++r) {
        const std::size_t t = vi * static_cast<std::size_t>(reps) + static_cast<std::size_t>(r);
        if (failed[t]) continue;
        sum += results[t][mi];
        ++ok;
      }
      cell.failed = reps - ok;
      if (ok == 0) {
        cell.mean = std::numeric_limits<double>::quiet_NaN();
        cell.stddev = std::numeric_limits<double>::quiet_NaN();
      } else {
        cell.mean = sum / ok;
        double ss = 0.0;
        for (int r = 0; r < reps; ++r) {
          const std::size_t t = vi * static_cast<std::size_t>(reps) + static_cast<std::size_t>(r);
          if (failed[t]) continue;
          const double d = results[t][mi] - cell.mean;
          ss += d * d;
        }
        cell.stddev = ok > 1 ? std::sqrt(ss / (ok - 1)) : 0.0;
      }
      out.cells.push_back(std::move(cell));
    }
  }
  return out;
}

std::string axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::nodes: return "n";
    case SweepAxis::layers: return "L";
    case SweepAxis::strength: return "w";
  }
  return "?";
}

std::string grid_csv(const GridResult& result, const ExperimentGrid& grid) {
  std::ostringstream out;
  const std::string model = grid.model == ModelKind::block ? "dimple" : "gdpg";
  const std::string axis = axis_name(grid.axis);
  out << "model,axis,value,metric,mean,std,replicates,failed\n";
  for (const auto& cell : result.cells) {
    out << model << ',' << axis << ',' << format_double(cell.value) << ',' << cell.metric << ','
        << format_double(cell.mean) << ',' << format_double(cell.stddev) << ','
        << cell.replicates << ',' << cell.failed << '\n';
  }
  return out.str();
}

ExperimentGrid load_grid(const std::string& path) {
  ExperimentGrid grid;
  grid.metrics.clear();
  bool saw_format = false, saw_model = false, saw_axis = false, saw_values = false;
  bool saw_metrics = false;
  std::vector<Eigen::Index> k_list;
  for (const auto& line : textio::read_lines(path)) {
    const std::string where = textio::location(path, line.number);
    const std::string& key = line.tokens[0];
    const std::size_t nvals = line.tokens.size() - 1;
    auto one = [&](const char* k) {
      require_data(nvals == 1, where + std::string(k) + " takes one value");
      return line.tokens[1];
    };
    if (key == "format") {
      require_data(nvals == 2 && line.tokens[1] == "dimple-grid" && line.tokens[2] == "1",
                   where + "unsupported format line");
      saw_format = true;
    } else if (key == "model") {
      const std::string v = one("model");
      require_data(v == "dimple" || v == "gdpg", where + "model must be dimple or gdpg");
      grid.model = v == "dimple" ? ModelKind::block : ModelKind::gdpg;
      saw_model = true;
    } else if (key == "axis") {
      const std::string v = one("axis");
      if (v == "n") grid.axis = SweepAxis::nodes;
      else if (v == "L") grid.axis = SweepAxis::layers;
      else if (v == "w") grid.axis = SweepAxis::strength;
      else throw data_error(where + "axis must be n, L, or w");
      saw_axis = true;
    } else if (key == "values") {
      require_data(nvals >= 1, where + "values needs at least one entry");
      for (std::size_t t = 1; t < line.tokens.size(); ++t) {
        grid.values.push_back(textio::parse_real(line.tokens[t], where));
      }
      saw_values = true;
    } else if (key == "replicates") {
      grid.replicates = static_cast<int>(textio::parse_int(one("replicates"), where));
    } else if (key == "seed") {
      grid.seed = textio::parse_u64(one("seed"), where);
    } else if (key == "n") {
      grid.base.n = textio::parse_int(one("n"), where);
    } else if (key == "L") {
      grid.base.L = textio::parse_int(one("L"), where);
    } else if (key == "M") {
      grid.base.M = textio::parse_int(one("M"), where);
    } else if (key == "K") {
      require_data(nvals >= 1, where + "K needs at least one entry");
      for (std::size_t t = 1; t < line.tokens.size(); ++t) {
        k_list.push_back(textio::parse_int(line.tokens[t], where));
      }
    } else if (key == "c") {
      grid.base.edge_lo = textio::parse_real(one("c"), where);
    } else if (key == "d") {
      grid.base.edge_hi = textio::parse_real(one("d"), where);
    } else if (key == "w") {
      grid.base.offdiag_scale = textio::parse_real(one("w"), where);
    } else if (key == "alpha") {
      grid.base.dirichlet_alpha = textio::parse_real(one("alpha"), where);
    } else if (key == "metrics") {
      require_data(nvals >= 1, where + "metrics needs at least one entry");
      grid.metrics.assign(line.tokens.begin() + 1, line.tokens.end());
      saw_metrics = true;
    } else if (key == "noiseless") {
      const std::string v = one("noiseless");
      require_data(v == "0" || v == "1", where + "noiseless must be 0 or 1");
      grid.noiseless = v == "1";
    } else {
      throw data_error(where + "unknown grid key '" + key + "'");
    }
  }
  require_data(saw_format, path + ": missing format line");
  require_data(saw_model, path + ": missing model");
  require_data(saw_axis, path + ": missing axis");
  require_data(saw_values, path + ": missing values");
  require_data(saw_metrics, path + ": missing metrics");
  require_data(!k_list.empty(), path + ": missing K");
  grid.base.K = std::move(k_list);
  try {
    grid.validate();
  } catch (const config_error& e) {
    throw data_error(path + ": " + e.what());
  }
  return grid;
}

}  // namespace dimple
