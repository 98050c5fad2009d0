#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "dimple/fit.hpp"
#include "dimple/network.hpp"

// Recovery-error metrics.  Estimated labels are only identified up to
// permutation, so every metric minimizes over the relevant relabelings:
// label matchings solve a min-cost assignment exactly; the max-form subspace
// error enumerates group permutations outright (capped at 8 groups).

namespace dimple {

// exact min-cost row->col assignment on a square cost matrix (O(n^3)
// shortest-augmenting-path with potentials); returns col index per row
std::vector<int> min_cost_assignment(const Eigen::MatrixXd& cost);

struct LabelMatch {
  std::vector<int> perm;          // est label -> matched truth label (-1 if unmatched)
  Eigen::Index disagreements = 0; // points left unmatched under the best relabeling
};

// best alignment of two labelings of the same items; label counts may differ
// (unmatched classes count all their items as disagreements)
LabelMatch match_labels(const std::vector<int>& est, const std::vector<int>& truth,
                        int num_est_labels, int num_truth_labels);

// misclassified fraction of layers under the best group relabeling
double layer_error(const LayerPartition& est, const LayerPartition& truth);

struct WithinLayerError {
  double overall = 0.0;               // average over groups of per_group
  std::vector<double> per_group;      // misclassified node fraction, by truth group
  std::vector<int> group_perm;        // truth group -> matched estimated group
};

// community-recovery error: estimated groups are matched to truth groups by
// minimizing total node disagreements, communities matched within each pair
WithinLayerError within_layer_error(const NodePartition& est, const NodePartition& truth);

struct SubspaceErrors {
  double max_error = 0.0;   // min over group permutations of the largest
                            // Frobenius principal-angle distance
  double ave_error = 0.0;   // min over permutations of the mean squared distance
  std::vector<int> group_perm;  // truth group -> estimated group (sum matching)
};

// distances between estimated and planted group subspaces; pairs with unequal
// dimensions cost the maximum possible distance sqrt(min(K, K'))
SubspaceErrors subspace_errors(const SubspaceSet& est, const SubspaceSet& truth);

struct ErrorReport {
  double r_bl = 0.0;                      // between-layer misclassification rate
  std::optional<double> r_wl;             // within-layer misclassification rate
  std::vector<double> r_wl_per_group;     // by truth group
  std::optional<double> r_s_max;          // subspace errors, max and average form
  std::optional<double> r_s_ave;
  std::vector<int> group_perm;            // truth group -> estimated group
};

// every applicable metric for a fit against the generating truth
ErrorReport score_fit(const FitResult& fit, const GroundTruth& truth);

}  // namespace dimple
