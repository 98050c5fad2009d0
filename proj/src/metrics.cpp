#include "dimple/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace dimple {

std::vector<int> min_cost_assignment(const Eigen::MatrixXd& cost) {
  require_config(cost.rows() == cost.cols() && cost.rows() >= 1,
                 "assignment: cost matrix must be square and non-empty");
  require_data(cost.allFinite(), "assignment: non-finite costs");
  const int n = static_cast<int>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();

  // shortest augmenting paths with dual potentials
  std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<double> v(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<int> p(static_cast<std::size_t>(n) + 1, 0);    // column -> assigned row
  std::vector<int> way(static_cast<std::size_t>(n) + 1, 0);  // augmenting-path backtracking
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(n) + 1, inf);
    std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const int i0 = p[static_cast<std::size_t>(j0)];
      int j1 = -1;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] -
                           v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= n; ++j) {
    if (p[static_cast<std::size_t>(j)] > 0)
      row_to_col[static_cast<std::size_t>(p[static_cast<std::size_t>(j)]) - 1] = j - 1;
  }
  return row_to_col;
}

LabelMatch match_labels(const std::vector<int>& est, const std::vector<int>& truth,
                        int num_est_labels, int num_truth_labels) {
  require_config(est.size() == truth.size(), "match_labels: label vectors differ in length");
  require_config(!est.empty(), "match_labels: empty label vectors");
  require_config(num_est_labels >= 1 && num_truth_labels >= 1, "match_labels: bad label counts");
  const auto n = static_cast<Eigen::Index>(est.size());
  Eigen::MatrixXd agree = Eigen::MatrixXd::Zero(num_est_labels, num_truth_labels);
  for (std::size_t i = 0; i < est.size(); ++i) {
    require_config(est[i] >= 0 && est[i] < num_est_labels, "match_labels: est label out of range");
    require_config(truth[i] >= 0 && truth[i] < num_truth_labels,
                   "match_labels: truth label out of range");
    agree(est[i], truth[i]) += 1.0;
  }

  // maximize agreement: min-cost assignment on negated counts, padded square
  const int s = std::max(num_est_labels, num_truth_labels);
  Eigen::MatrixXd cost = Eigen::MatrixXd::Zero(s, s);
  cost.topLeftCorner(num_est_labels, num_truth_labels) = -agree;
  const auto assignment = min_cost_assignment(cost);

  LabelMatch out;
  out.perm.assign(static_cast<std::size_t>(num_est_labels), -1);
  double matched = 0.0;
  for (int a = 0; a < num_est_labels; ++a) {
    const int b = assignment[static_cast<std::size_t>(a)];
    if (b < num_truth_labels) {
      out.perm[static_cast<std::size_t>(a)] = b;
      matched += agree(a, b);
    }
  }
  out.disagreements = n - static_cast<Eigen::Index>(matched);
  return out;
}

double layer_error(const LayerPartition& est, const LayerPartition& truth) {
  require_config(est.labels.size() == truth.labels.size(),
                 "layer_error: partitions cover different layer counts");
  require_config(est.num_groups == truth.num_groups,
                 "layer_error: partitions have different group counts");
  const auto match = match_labels(est.labels, truth.labels, est.num_groups, truth.num_groups);
  return static_cast<double>(match.disagreements) / static_cast<double>(est.labels.size());
}

WithinLayerError within_layer_error(const NodePartition& est, const NodePartition& truth) {
  const auto m = truth.labels.size();
  require_config(est.labels.size() == m && m >= 1,
                 "within_layer_error: partitions have different group counts");
  const std::size_t n = truth.labels[0].size();
  for (std::size_t g = 0; g < m; ++g) {
    require_config(est.labels[g].size() == n && truth.labels[g].size() == n,
                   "within_layer_error: partitions cover different node counts");
  }

  // disagreements for every (truth group, estimated group) pairing
  Eigen::MatrixXd d(m, m);
  for (std::size_t mt = 0; mt < m; ++mt) {
    for (std::size_t me = 0; me < m; ++me) {
      d(static_cast<Eigen::Index>(mt), static_cast<Eigen::Index>(me)) =
          static_cast<double>(match_labels(est.labels[me], truth.labels[mt],
                                           est.num_communities[me], truth.num_communities[mt])
                                  .disagreements);
    }
  }
  const auto perm = min_cost_assignment(d);

  WithinLayerError out;
  out.group_perm = perm;
  out.per_group.resize(m);
  double total = 0.0;
  for (std::size_t mt = 0; mt < m; ++mt) {
    const double dis = d(static_cast<Eigen::Index>(mt), perm[mt]);
    out.per_group[mt] = dis / static_cast<double>(n);
    total += out.per_group[mt];
  }
  out.overall = total / static_cast<double>(m);
  return out;
}

SubspaceErrors subspace_errors(const SubspaceSet& est, const SubspaceSet& truth) {
  const auto m = truth.bases.size();
  require_config(est.bases.size() == m && m >= 1,
                 "subspace_errors: sets have different group counts");
  require_config(m <= 8, "subspace_errors: exact permutation search limited to 8 groups");

  Eigen::MatrixXd d(m, m);
  for (std::size_t mt = 0; mt < m; ++mt) {
    for (std::size_t me = 0; me < m; ++me) {
      const auto& bt = truth.bases[mt];
      const auto& be = est.bases[me];
      require_config(bt.rows() == be.rows(), "subspace_errors: bases live in different spaces");
      d(static_cast<Eigen::Index>(mt), static_cast<Eigen::Index>(me)) =
          bt.cols() == be.cols()
              ? sin_theta(bt, be).frobenius
              : std::sqrt(static_cast<double>(std::min(bt.cols(), be.cols())));
    }
  }

  SubspaceErrors out;

  // sum form: assignment on squared distances, total recomputed in group order
  out.group_perm = min_cost_assignment(d.cwiseProduct(d));
  double total = 0.0;
  for (std::size_t mt = 0; mt < m; ++mt) {
    const double v = d(static_cast<Eigen::Index>(mt), out.group_perm[mt]);
    total += v * v;
  }
  out.ave_error = total / static_cast<double>(m);

  // max form: exact search over group permutations
  std::vector<int> p(m);
  std::iota(p.begin(), p.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double worst = 0.0;
    for (std::size_t mt = 0; mt < m; ++mt) {
      worst = std::max(worst, d(static_cast<Eigen::Index>(mt), p[mt]));
    }
    best = std::min(best, worst);
  } while (std::next_permutation(p.begin(), p.end()));
  out.max_error = best;
  return out;
}

ErrorReport score_fit(const FitResult& fit, const GroundTruth& truth) {
  ErrorReport report;

  LayerPartition truth_layers;
  truth_layers.num_groups = static_cast<int>(truth.num_groups);
  truth_layers.labels = truth.layer_labels;
  report.r_bl = layer_error(fit.layers, truth_layers);

  if (fit.nodes.has_value() && truth.kind == ModelKind::block) {
    NodePartition truth_nodes;
    truth_nodes.labels = truth.node_labels;
    for (Eigen::Index k : truth.group_dims) truth_nodes.num_communities.push_back(static_cast<int>(k));
    const auto wl = within_layer_error(*fit.nodes, truth_nodes);
    report.r_wl = wl.overall;
    report.r_wl_per_group = wl.per_group;
    report.group_perm = wl.group_perm;
  }

  if (!truth.bases.empty() &&
      truth.bases.size() == static_cast<std::size_t>(fit.subspaces.num_groups())) {
    SubspaceSet truth_spaces;
    truth_spaces.bases = truth.bases;
    const auto se = subspace_errors(fit.subspaces, truth_spaces);
    report.r_s_max = se.max_error;
    report.r_s_ave = se.ave_error;
    if (report.group_perm.empty()) report.group_perm = se.group_perm;
  }
  return report;
}

}  // namespace dimple
