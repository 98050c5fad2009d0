#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "dimple/common.hpp"

// Restarted Lloyd k-means with kmeans++ seeding.  Deterministic given the
// seed: every restart draws from its own substream, assignment ties go to the
// lowest center index, empty clusters are repaired by reseeding on the point
// farthest from its center, and the best restart wins (ties to the earliest).

namespace dimple {

struct KMeansOptions {
  int restarts = 20;
  int max_iters = 100;
};

struct KMeansResult {
  std::vector<int> labels;     // per point, in [0, k); every cluster non-empty
  Eigen::MatrixXd centers;     // k x d
  double cost = 0.0;           // sum of squared point-to-center distances
  std::vector<double> cost_trace;  // per-iteration cost of the winning restart
};

// points are rows of an N x d matrix; requires 1 <= k <= N
KMeansResult approx_kmeans(const Eigen::MatrixXd& points, int k, const KMeansOptions& opt,
                           std::uint64_t seed);

}  // namespace dimple
