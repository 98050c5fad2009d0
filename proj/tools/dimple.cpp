#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dimple/fit.hpp"
#include "dimple/generate.hpp"
#include "dimple/io.hpp"
#include "dimple/metrics.hpp"
#include "dimple/rng.hpp"
#include "dimple/simulate.hpp"

// command-line front end
//   generate   draw a planted instance and write it as a network directory
//   fit        run the three-stage pipeline on a network directory
//   simulate   replicate generate->sample->fit->score over a parameter sweep
//   rank       eigengap diagnostics for choosing the group / community counts
// exit codes: 0 success, 2 usage or configuration, 3 data, 4 numerical

namespace {

namespace fs = std::filesystem;

struct GenerateArgs {
  std::string model;
  dimple::DimpleConfig cfg;
  std::vector<long long> k_list;
  double alpha = -1.0;  // required for gdpg
  long long n = 0, layers = 0, groups = 0;
  std::string out;
  bool probabilities = false;
};

struct FitArgs {
  std::string input, out, truth;
  long long groups = 0;
  std::vector<long long> k_list;
  int restarts = 20;
  std::uint64_t seed = 0;
  bool subspaces_only = false;
  bool exact = false;
};

struct SimulateArgs {
  std::string grid_file, out;
  int reps = -1;
  int workers = 1;
};

struct RankArgs {
  std::string input, what, labels;
  long long groups = 0;
  long long k_max = 0;  // 0: automatic
};

std::vector<Eigen::Index> to_dims(const std::vector<long long>& xs) {
  std::vector<Eigen::Index> out;
  out.reserve(xs.size());
  for (long long x : xs) out.push_back(static_cast<Eigen::Index>(x));
  return out;
}

void run_generate(const GenerateArgs& a) {
  const auto kind = a.model == "dimple" ? dimple::ModelKind::block : dimple::ModelKind::gdpg;
  dimple::DimpleConfig cfg = a.cfg;
  cfg.n = a.n;
  cfg.L = a.layers;
  cfg.M = a.groups;
  cfg.K = to_dims(a.k_list);
  if (kind == dimple::ModelKind::gdpg) {
    dimple::require_config(a.alpha > 0.0, "generate: gdpg needs --alpha > 0");
    cfg.dirichlet_alpha = a.alpha;
  }
  cfg.validate(kind);

  // build everything in memory first so usage errors never leave partial output
  const dimple::GroundTruth truth = kind == dimple::ModelKind::block
                                        ? dimple::generate_block_truth(cfg)
                                        : dimple::generate_gdpg_truth(cfg);
  const dimple::MultiplexNetwork net = dimple::sample_adjacency(truth, cfg.seed);
  const auto diag = dimple::validate_network(net);

  dimple::save_network(net, a.out);
  dimple::save_truth(truth, a.out);
  if (a.probabilities) {
    dimple::SymmetricLayers prob;
    prob.n = truth.n;
    prob.layers = truth.probabilities.layers;
    prob.ambient_dims = net.ambient_dims;
    dimple::save_weighted_network(prob, (fs::path(a.out) / "noiseless").string());
  }

  std::cout << "generated " << a.model << " network: n=" << cfg.n << " L=" << cfg.L
            << " M=" << cfg.M << " seed=" << cfg.seed << "\n";
  for (Eigen::Index l = 0; l < net.num_layers(); ++l) {
    std::cout << "layer " << l << ": density " << dimple::format_double(diag.densities[l])
              << "\n";
  }
  std::cout << "wrote " << a.out << "\n";
}

void run_fit(const FitArgs& a) {
  dimple::FitOptions opt;
  opt.kmeans.restarts = a.restarts;
  opt.subspaces_only = a.subspaces_only;
  opt.exact_squares = a.exact;
  dimple::require_config(a.groups >= 1, "fit: --M must be at least 1");
  const auto dims = to_dims(a.k_list);

  dimple::FitResult fit;
  if (a.exact) {
    const auto sym = dimple::load_weighted_network(a.input);
    fit = dimple::fit_layers(sym.layers, sym.ambient_dims, static_cast<int>(a.groups), dims, opt,
                             a.seed);
  } else {
    const auto net = dimple::load_network(a.input);
    fit = dimple::fit_multiplex(net, static_cast<int>(a.groups), dims, opt, a.seed);
  }

  std::optional<dimple::ErrorReport> report;
  if (!a.truth.empty()) {
    const auto truth = dimple::load_truth(a.truth);
    report = dimple::score_fit(fit, truth);
  }
  dimple::write_results(fit, report, a.out);

  const auto sizes = fit.layers.group_sizes();
  std::cout << "fit: M=" << fit.layers.num_groups << " group sizes";
  for (auto s : sizes) std::cout << ' ' << s;
  std::cout << "\n";
  if (report) {
    std::cout << "r_bl " << dimple::format_double(report->r_bl) << "\n";
    if (report->r_wl) std::cout << "r_wl " << dimple::format_double(*report->r_wl) << "\n";
    if (report->r_s_max) std::cout << "r_s_max " << dimple::format_double(*report->r_s_max) << "\n";
    if (report->r_s_ave) std::cout << "r_s_ave " << dimple::format_double(*report->r_s_ave) << "\n";
  }
  std::cout << "wrote " << a.out << "\n";
}

void run_simulate(const SimulateArgs& a) {
  dimple::ExperimentGrid grid = dimple::load_grid(a.grid_file);
  if (a.reps > 0) grid.replicates = a.reps;
  dimple::require_config(a.workers >= 1, "simulate: --workers must be at least 1");
  const auto result = dimple::run_grid(grid, a.workers);
  const std::string csv = dimple::grid_csv(result, grid);
  if (!fs::path(a.out).parent_path().empty()) {
    fs::create_directories(fs::path(a.out).parent_path());
  }
  std::ofstream out(a.out, std::ios::binary | std::ios::trunc);
  dimple::require_data(out.good(), "simulate: cannot write " + a.out);
  out << csv;
  dimple::require_data(out.good(), "simulate: write failure on " + a.out);
  std::cout << "wrote " << a.out << " (" << result.cells.size() << " cells)\n";
}

void print_suggestion(const std::string& label, const Eigen::VectorXd& sigma,
                      Eigen::Index k_max_arg) {
  Eigen::Index k_max = k_max_arg > 0 ? k_max_arg : std::min<Eigen::Index>(sigma.size() - 1, 20);
  k_max = std::min(k_max, sigma.size() - 1);
  dimple::require_numeric(sigma.size() >= 2 && sigma[0] > 0.0,
                          "rank: spectrum of " + label + " is degenerate");
  const Eigen::Index pick = dimple::eigengap_select(sigma, k_max);
  const double ratio = dimple::eigengap_ratio(sigma, pick);
  std::cout << label << " spectrum:";
  for (Eigen::Index i = 0; i < std::min<Eigen::Index>(sigma.size(), k_max + 1); ++i) {
    std::cout << ' ' << dimple::format_double(sigma[i]);
  }
  std::cout << "\n";
  std::cout << "suggested " << label << " rank: " << pick;
  if (ratio < 1.05) std::cout << " (low confidence: flat spectrum)";
  std::cout << "\n";
}

void run_rank(const RankArgs& a) {
  if (a.what == "layers") {
    const auto net = dimple::load_network(a.input);
    const auto bases = dimple::layer_embeddings(net);
    const Eigen::MatrixXd gram = dimple::gram_from_bases(bases);
    const auto spec = dimple::sym_eigs_topk(gram, gram.rows());
    // singular values of the projection stack: square roots of the
    // alignment-matrix eigenvalues
    Eigen::VectorXd sigma(spec.values.size());
    for (Eigen::Index i = 0; i < sigma.size(); ++i) {
      sigma[i] = std::sqrt(std::max(0.0, spec.values[i]));
    }
    print_suggestion("group", sigma, a.k_max);
    return;
  }
  dimple::require_config(a.what == "groups", "rank: --what must be layers or groups");
  dimple::require_config(a.groups >= 1, "rank: --what groups needs --M");
  dimple::require_config(!a.labels.empty(),
                         "rank: --what groups needs --labels (layer_labels.txt of a fit)");
  const auto net = dimple::load_network(a.input);
  dimple::LayerPartition part;
  part.num_groups = static_cast<int>(a.groups);
  part.labels = dimple::load_labels(a.labels);
  try {
    part.validate();
    dimple::require_config(part.num_layers() == net.num_layers(),
                           "rank: label count does not match the network");
  } catch (const dimple::config_error& e) {
    throw dimple::data_error(std::string("rank: ") + e.what());
  }

  std::vector<Eigen::MatrixXd> squares;
  squares.reserve(net.layers.size());
  for (const auto& layer : net.layers) squares.push_back(dimple::bias_adjusted_square(layer));
  const auto h = dimple::aggregate_groups(squares, part);
  for (std::size_t m = 0; m < h.size(); ++m) {
    const auto spec = dimple::sym_eigs_topk(h[m], h[m].rows());
    const Eigen::VectorXd sigma = spec.values.cwiseAbs();
    // groups are numbered 1-based, matching the label files
    print_suggestion("group " + std::to_string(m + 1) + " community", sigma, a.k_max);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"diverse multiplex networks: planted models, spectral fitting, sweeps"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "draw a planted instance and write it to a directory");
  g->add_option("--model", gen.model, "dimple (block communities) or gdpg (latent positions)")
      ->required()
      ->check(CLI::IsMember({"dimple", "gdpg"}));
  g->add_option("--n", gen.n, "number of nodes")->required();
  g->add_option("--L", gen.layers, "number of layers")->required();
  g->add_option("--M", gen.groups, "number of layer groups")->required();
  g->add_option("--K", gen.k_list, "communities per group (single value broadcasts)")
      ->required()
      ->delimiter(',');
  g->add_option("--c", gen.cfg.edge_lo, "connection strength lower bound")->capture_default_str();
  g->add_option("--d", gen.cfg.edge_hi, "connection strength upper bound")->required();
  g->add_option("--w", gen.cfg.offdiag_scale, "between-community strength scale")
      ->capture_default_str();
  g->add_option("--alpha", gen.alpha, "latent-position concentration (gdpg; required there)");
  g->add_option("--seed", gen.cfg.seed, "random seed")->capture_default_str();
  g->add_option("--out", gen.out, "output directory")->required();
  g->add_flag("--probabilities", gen.probabilities,
              "also write the exact probability layers under noiseless/");

  FitArgs fit;
  auto* f = app.add_subcommand("fit", "estimate groups, subspaces, and communities");
  f->add_option("--input", fit.input, "network directory")->required();
  f->add_option("--M", fit.groups, "number of layer groups")->required();
  f->add_option("--K", fit.k_list, "dimensions per group, matched to groups by decreasing size "
                                   "(single value broadcasts)")
      ->required()
      ->delimiter(',');
  f->add_option("--seed", fit.seed, "random seed")->capture_default_str();
  f->add_option("--out", fit.out, "results directory")->required();
  f->add_option("--truth", fit.truth, "directory with planted truth files, enables error metrics");
  f->add_option("--restarts", fit.restarts, "k-means restarts")->capture_default_str();
  f->add_flag("--subspaces-only", fit.subspaces_only, "skip community detection");
  f->add_flag("--exact", fit.exact,
              "treat the input as exact symmetric layers (weighted networks; squares used "
              "directly, no sampling-bias adjustment)");

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "run a replicated parameter sweep, write a CSV");
  s->add_option("--grid", sim.grid_file, "grid description file")->required();
  s->add_option("--out", sim.out, "output CSV path")->required();
  s->add_option("--reps", sim.reps, "override the grid's replicate count")
      ->check(CLI::PositiveNumber);
  s->add_option("--workers", sim.workers, "worker threads (output-independent)")
      ->capture_default_str();

  RankArgs rank;
  auto* r = app.add_subcommand("rank", "eigengap suggestions for M or the K_m");
  r->add_option("--input", rank.input, "network directory")->required();
  r->add_option("--what", rank.what, "layers: suggest M; groups: suggest each K_m")
      ->required()
      ->check(CLI::IsMember({"layers", "groups"}));
  r->add_option("--M", rank.groups, "group count (groups mode)");
  r->add_option("--labels", rank.labels, "layer label file from a fit (groups mode)");
  r->add_option("--k-max", rank.k_max, "deepest rank to scan");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (g->parsed()) run_generate(gen);
    if (f->parsed()) run_fit(fit);
    if (s->parsed()) run_simulate(sim);
    if (r->parsed()) run_rank(rank);
  } catch (const dimple::config_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const dimple::data_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const dimple::numeric_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
