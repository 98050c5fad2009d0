#include "dimple/kmeans.hpp"

#include <limits>

#include "dimple/rng.hpp"

namespace dimple {

namespace {

struct Run {
  std::vector<int> labels;
  Eigen::MatrixXd centers;
  double cost = std::numeric_limits<double>::infinity();
  std::vector<double> cost_trace;
};

// squared distance of every point to its nearest chosen center
void refresh_min_dists(const Eigen::MatrixXd& pts, const Eigen::RowVectorXd& center,
                       Eigen::VectorXd& d2) {
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    const double d = (pts.row(i) - center).squaredNorm();
    if (d < d2[i]) d2[i] = d;
  }
}

// kmeans++: first center uniform, then proportional to squared distance; if
// every remaining point coincides with a center, fall back to the lowest
// unused index
Eigen::MatrixXd seed_centers(const Eigen::MatrixXd& pts, int k, Rng& rng) {
  const Eigen::Index n = pts.rows();
  Eigen::MatrixXd centers(k, pts.cols());
  std::vector<char> used(static_cast<std::size_t>(n), 0);

  Eigen::Index first = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
  centers.row(0) = pts.row(first);
  used[static_cast<std::size_t>(first)] = 1;

  Eigen::VectorXd d2 = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
  refresh_min_dists(pts, centers.row(0), d2);

  for (int c = 1; c < k; ++c) {
    const double total = d2.sum();
    Eigen::Index pick = -1;
    if (total > 0.0) {
      const double u = rng.uniform01() * total;
      double acc = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        acc += d2[i];
        if (acc > u) {
          pick = i;
          break;
        }
      }
      if (pick < 0) {  // numerical edge: land on the last positive-mass point
        for (Eigen::Index i = n - 1; i >= 0; --i) {
          if (d2[i] > 0.0) {
            pick = i;
            break;
          }
        }
      }
    }
    if (pick < 0) {  // all points coincide with existing centers
      for (Eigen::Index i = 0; i < n; ++i) {
        if (!used[static_cast<std::size_t>(i)]) {
          pick = i;
          break;
        }
      }
      if (pick < 0) pick = 0;
    }
    centers.row(c) = pts.row(pick);
    used[static_cast<std::size_t>(pick)] = 1;
    refresh_min_dists(pts, centers.row(c), d2);
  }
  return centers;
}

// nearest center per point, ties to the lowest center index
void assign(const Eigen::MatrixXd& pts, const Eigen::MatrixXd& centers, std::vector<int>& labels) {
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    int best = 0;
    double bestd = (pts.row(i) - centers.row(0)).squaredNorm();
    for (Eigen::Index c = 1; c < centers.rows(); ++c) {
      const double d = (pts.row(i) - centers.row(c)).squaredNorm();
      if (d < bestd) {
        bestd = d;
        best = static_cast<int>(c);
      }
    }
    labels[static_cast<std::size_t>(i)] = best;
  }
}

// move the point farthest from its center (among clusters that can spare one)
// into each empty cluster
void repair_empties(const Eigen::MatrixXd& pts, const Eigen::MatrixXd& centers, int k,
                    std::vector<int>& labels) {
  std::vector<Eigen::Index> counts(static_cast<std::size_t>(k), 0);
  for (int z : labels) ++counts[static_cast<std::size_t>(z)];
  for (int empty = 0; empty < k; ++empty) {
    if (counts[static_cast<std::size_t>(empty)] > 0) continue;
    Eigen::Index far = -1;
    double fard = -1.0;
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
      const int z = labels[static_cast<std::size_t>(i)];
      if (counts[static_cast<std::size_t>(z)] < 2) continue;
      const double d = (pts.row(i) - centers.row(z)).squaredNorm();
      if (d > fard) {
        fard = d;
        far = i;
      }
    }
    // k <= n guarantees some cluster has two or more points
    --counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(far)])];
    labels[static_cast<std::size_t>(far)] = empty;
    ++counts[static_cast<std::size_t>(empty)];
  }
}

void update_centers(const Eigen::MatrixXd& pts, const std::vector<int>& labels, int k,
                    Eigen::MatrixXd& centers) {
  centers.setZero();
  std::vector<Eigen::Index> counts(static_cast<std::size_t>(k), 0);
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    centers.row(labels[static_cast<std::size_t>(i)]) += pts.row(i);
    ++counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
  }
  for (int c = 0; c < k; ++c) {
    if (counts[static_cast<std::size_t>(c)] > 0)
      centers.row(c) /= static_cast<double>(counts[static_cast<std::size_t>(c)]);
  }
}

double total_cost(const Eigen::MatrixXd& pts, const Eigen::MatrixXd& centers,
                  const std::vector<int>& labels) {
  double cost = 0.0;
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    cost += (pts.row(i) - centers.row(labels[static_cast<std::size_t>(i)])).squaredNorm();
  }
  return cost;
}

Run lloyd(const Eigen::MatrixXd& pts, int k, const KMeansOptions& opt, std::uint64_t seed) {
  Rng rng(seed);
  Run run;
  run.centers = seed_centers(pts, k, rng);
  run.labels.assign(static_cast<std::size_t>(pts.rows()), 0);

  std::vector<int> prev;
  for (int iter = 0; iter < opt.max_iters; ++iter) {
    assign(pts, run.centers, run.labels);
    repair_empties(pts, run.centers, k, run.labels);
    update_centers(pts, run.labels, k, run.centers);
    run.cost_trace.push_back(total_cost(pts, run.centers, run.labels));
    if (run.labels == prev) break;
    prev = run.labels;
  }
  run.cost = run.cost_trace.back();
  return run;
}

}  // namespace

KMeansResult approx_kmeans(const Eigen::MatrixXd& points, int k, const KMeansOptions& opt,
                           std::uint64_t seed) {
  require_config(points.rows() >= 1, "kmeans: need at least one point");
  require_config(k >= 1 && k <= points.rows(), "kmeans: k must be in [1, #points]");
  require_config(opt.restarts >= 1 && opt.max_iters >= 1, "kmeans: bad options");
  require_data(points.allFinite(), "kmeans: non-finite coordinates");

  Run best;
  for (int r = 0; r < opt.restarts; ++r) {
    Run run = lloyd(points, k, opt, derive_seed(seed, {kKmeansStream, static_cast<std::uint64_t>(r)}));
    if (run.cost < best.cost) best = std::move(run);
  }
  KMeansResult out;
  out.labels = std::move(best.labels);
  out.centers = std::move(best.centers);
  out.cost = best.cost;
  out.cost_trace = std::move(best.cost_trace);
  return out;
}

}  // namespace dimple
