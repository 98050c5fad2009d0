#include "dimple/generate.hpp"

#include <Eigen/SVD>
#include <string>

#include "dimple/rng.hpp"

namespace dimple {

namespace {

// uniform labels over [0, k), resampled until every class appears
std::vector<int> nonempty_labels(Rng& rng, Eigen::Index count, Eigen::Index k,
                                 const char* what) {
  std::vector<int> labels(static_cast<std::size_t>(count));
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::vector<char> seen(static_cast<std::size_t>(k), 0);
    for (auto& z : labels) {
      z = static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
      seen[static_cast<std::size_t>(z)] = 1;
    }
    bool all = true;
    for (char s : seen) all = all && s != 0;
    if (all) return labels;
  }
  throw numeric_error(std::string("generate: could not draw non-empty ") + what +
                      " in 1000 attempts");
}

// symmetric K x K connection matrix: Uniform[lo, hi] upper triangle mirrored,
// off-diagonal entries scaled
Eigen::MatrixXd draw_connectivity(Rng& rng, Eigen::Index k, const DimpleConfig& cfg) {
  Eigen::MatrixXd b(k, k);
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index c = a; c < k; ++c) {
      double v = rng.uniform(cfg.edge_lo, cfg.edge_hi);
      if (a != c) v *= cfg.offdiag_scale;
      b(a, c) = v;
      b(c, a) = v;
    }
  }
  return b;
}

std::vector<int> draw_layer_labels(const DimpleConfig& cfg) {
  Rng rng(derive_seed(cfg.seed, {kLayerLabelStream}));
  return nonempty_labels(rng, cfg.L, cfg.M, "layer groups");
}

std::vector<Eigen::MatrixXd> draw_all_connectivity(const DimpleConfig& cfg,
                                                   const std::vector<int>& layer_labels,
                                                   const std::vector<Eigen::Index>& dims) {
  std::vector<Eigen::MatrixXd> bs;
  bs.reserve(static_cast<std::size_t>(cfg.L));
  for (Eigen::Index l = 0; l < cfg.L; ++l) {
    Rng rng(derive_seed(cfg.seed, {kConnectivityStream, static_cast<std::uint64_t>(l)}));
    bs.push_back(draw_connectivity(rng, dims[static_cast<std::size_t>(layer_labels[static_cast<std::size_t>(l)])], cfg));
  }
  return bs;
}

}  // namespace

GroundTruth generate_block_truth(const DimpleConfig& cfg) {
  cfg.validate(ModelKind::block);
  GroundTruth truth;
  truth.kind = ModelKind::block;
  truth.n = cfg.n;
  truth.num_groups = cfg.M;
  truth.group_dims = cfg.group_dims();
  truth.layer_labels = draw_layer_labels(cfg);

  // communities per group, each drawn from its own substream
  truth.node_labels.resize(static_cast<std::size_t>(cfg.M));
  truth.bases.resize(static_cast<std::size_t>(cfg.M));
  for (Eigen::Index m = 0; m < cfg.M; ++m) {
    const Eigen::Index k = truth.group_dims[static_cast<std::size_t>(m)];
    Rng rng(derive_seed(cfg.seed, {kNodeLabelStream, static_cast<std::uint64_t>(m)}));
    auto& z = truth.node_labels[static_cast<std::size_t>(m)];
    z = nonempty_labels(rng, cfg.n, k, "communities");

    Eigen::VectorXd counts = Eigen::VectorXd::Zero(k);
    for (int zi : z) counts[zi] += 1.0;
    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(cfg.n, k);
    for (Eigen::Index i = 0; i < cfg.n; ++i) {
      const int zi = z[static_cast<std::size_t>(i)];
      v(i, zi) = 1.0 / std::sqrt(counts[zi]);
    }
    truth.bases[static_cast<std::size_t>(m)] = v;
  }

  truth.connectivity = draw_all_connectivity(cfg, truth.layer_labels, truth.group_dims);

  truth.probabilities.n = cfg.n;
  truth.probabilities.layers.reserve(static_cast<std::size_t>(cfg.L));
  for (Eigen::Index l = 0; l < cfg.L; ++l) {
    const int m = truth.layer_labels[static_cast<std::size_t>(l)];
    const auto& z = truth.node_labels[static_cast<std::size_t>(m)];
    const auto& b = truth.connectivity[static_cast<std::size_t>(l)];
    Eigen::MatrixXd p(cfg.n, cfg.n);
    for (Eigen::Index i = 0; i < cfg.n; ++i) {
      for (Eigen::Index j = 0; j < cfg.n; ++j) {
        p(i, j) = b(z[static_cast<std::size_t>(i)], z[static_cast<std::size_t>(j)]);
      }
    }
    truth.probabilities.layers.push_back(std::move(p));
  }
  return truth;
}

GroundTruth generate_gdpg_truth(const DimpleConfig& cfg) {
  cfg.validate(ModelKind::gdpg);
  GroundTruth truth;
  truth.kind = ModelKind::gdpg;
  truth.n = cfg.n;
  truth.num_groups = cfg.M;
  truth.group_dims = cfg.group_dims();
  truth.layer_labels = draw_layer_labels(cfg);

  truth.latent.resize(static_cast<std::size_t>(cfg.M));
  truth.bases.resize(static_cast<std::size_t>(cfg.M));
  for (Eigen::Index m = 0; m < cfg.M; ++m) {
    const Eigen::Index k = truth.group_dims[static_cast<std::size_t>(m)];
    Rng rng(derive_seed(cfg.seed, {kLatentStream, static_cast<std::uint64_t>(m)}));
    Eigen::MatrixXd x(cfg.n, k);
    for (Eigen::Index i = 0; i < cfg.n; ++i) {
      const auto row = rng.dirichlet(cfg.dirichlet_alpha, static_cast<int>(k));
      for (Eigen::Index a = 0; a < k; ++a) x(i, a) = row[static_cast<std::size_t>(a)];
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinU);
    require_numeric(svd.singularValues()[k - 1] >
                        1e-12 * std::max(1.0, svd.singularValues()[0]),
                    "generate: latent positions of group " + std::to_string(m) +
                        " are numerically rank deficient");
    truth.latent[static_cast<std::size_t>(m)] = x;
    truth.bases[static_cast<std::size_t>(m)] = svd.matrixU();
  }

  truth.connectivity = draw_all_connectivity(cfg, truth.layer_labels, truth.group_dims);

  truth.probabilities.n = cfg.n;
  truth.probabilities.layers.reserve(static_cast<std::size_t>(cfg.L));
  for (Eigen::Index l = 0; l < cfg.L; ++l) {
    const int m = truth.layer_labels[static_cast<std::size_t>(l)];
    const auto& x = truth.latent[static_cast<std::size_t>(m)];
    const auto& b = truth.connectivity[static_cast<std::size_t>(l)];
    // fill the upper triangle and mirror so the matrix is symmetric exactly
    const Eigen::MatrixXd xb = x * b;
    Eigen::MatrixXd p(cfg.n, cfg.n);
    for (Eigen::Index i = 0; i < cfg.n; ++i) {
      for (Eigen::Index j = i; j < cfg.n; ++j) {
        const double v = xb.row(i).dot(x.row(j));
        p(i, j) = v;
        p(j, i) = v;
      }
    }
    truth.probabilities.layers.push_back(std::move(p));
  }
  return truth;
}

MultiplexNetwork sample_adjacency(const GroundTruth& truth, std::uint64_t seed) {
  const Eigen::Index n = truth.n;
  const Eigen::Index L = truth.num_layers();
  require_config(n >= 2 && L >= 1, "sample_adjacency: empty truth");
  MultiplexNetwork net;
  net.n = n;
  net.layers.reserve(static_cast<std::size_t>(L));
  net.ambient_dims.reserve(static_cast<std::size_t>(L));
  for (Eigen::Index l = 0; l < L; ++l) {
    const auto& p = truth.probabilities.layers[static_cast<std::size_t>(l)];
    Rng rng(derive_seed(seed, {kAdjacencyStream, static_cast<std::uint64_t>(l)}));
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) {
        require_data(p(i, j) >= 0.0 && p(i, j) <= 1.0,
                     "sample_adjacency: probability outside [0, 1]");
        if (rng.bernoulli(p(i, j))) {
          a(i, j) = 1.0;
          a(j, i) = 1.0;
        }
      }
    }
    net.layers.push_back(std::move(a));
    net.ambient_dims.push_back(
        truth.group_dims[static_cast<std::size_t>(truth.layer_labels[static_cast<std::size_t>(l)])]);
  }
  return net;
}

}  // namespace dimple
