#include <Eigen/Dense>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "dimple/fit.hpp"
#include "dimple/generate.hpp"
#include "dimple/kmeans.hpp"
#include "dimple/linalg.hpp"
#include "doctest.h"
#include "test_util.hpp"

using dimple::DimpleConfig;
using dimple::FitOptions;
using dimple::FitResult;
using dimple::GroundTruth;
using dimple::LayerPartition;
using dimple::MultiplexNetwork;
using dimple::SubspaceSet;

namespace {

// block-model probability matrix for explicit community labels
Eigen::MatrixXd block_probabilities(const std::vector<int>& z, const Eigen::MatrixXd& b) {
  const Eigen::Index n = static_cast<Eigen::Index>(z.size());
  Eigen::MatrixXd p(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      p(i, j) = b(z[static_cast<std::size_t>(i)], z[static_cast<std::size_t>(j)]);
    }
  }
  return p;
}

}  // namespace

TEST_CASE("layer_embeddings spans the planted subspace of every exact layer") {
  DimpleConfig cfg = testutil::small_config(31, 20, 6, 2, 2);
  cfg.edge_lo = 0.1;  // keep the connection matrices full rank
  const GroundTruth t = generate_block_truth(cfg);
  const auto dims = std::vector<Eigen::Index>(static_cast<std::size_t>(cfg.L), 2);
  const auto embs = dimple::layer_embeddings(t.probabilities.layers, dims);
  REQUIRE(embs.size() == static_cast<std::size_t>(cfg.L));
  for (Eigen::Index l = 0; l < cfg.L; ++l) {
    const int m = t.layer_labels[static_cast<std::size_t>(l)];
    const auto d = dimple::sin_theta(embs[static_cast<std::size_t>(l)],
                                     t.bases[static_cast<std::size_t>(m)]);
    // sqrt(K - |U^T V|_F^2) loses half the digits near zero, so machine-exact
    // alignment still reads as ~1e-8
    CHECK(d.frobenius <= 1e-7);
  }
}

TEST_CASE("layer_embeddings names the degenerate layer") {
  DimpleConfig cfg = testutil::small_config(32, 12, 2, 1, 2);
  cfg.edge_lo = 0.1;
  const GroundTruth t = generate_block_truth(cfg);
  std::vector<Eigen::MatrixXd> layers = t.probabilities.layers;
  layers[1] = Eigen::MatrixXd::Zero(12, 12);
  try {
    dimple::layer_embeddings(layers, {2, 2});
    FAIL("expected a numeric_error");
  } catch (const dimple::numeric_error& e) {
    CHECK(std::string(e.what()).find("layer 1") != std::string::npos);
  }
}

TEST_CASE("between-layer grouping equals clustering the explicit vectorized projections") {
  // the L x L alignment Gram matrix is the Gram of the n^2 x L matrix whose
  // columns are the vectorized projections; its leading eigenvectors are that
  // matrix's right singular vectors, so both routes must induce the same
  // grouping of layers
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    DimpleConfig cfg = testutil::small_config(seed, 16, 8, 2, 2);
    cfg.edge_lo = 0.1;
    const GroundTruth t = generate_block_truth(cfg);
    const auto dims = std::vector<Eigen::Index>(8, 2);

    const auto res = dimple::between_layer_cluster(t.probabilities.layers, dims, 2, {}, seed);

    const auto embs = dimple::layer_embeddings(t.probabilities.layers, dims);
    Eigen::MatrixXd theta(16 * 16, 8);
    for (Eigen::Index l = 0; l < 8; ++l) {
      const Eigen::MatrixXd proj =
          embs[static_cast<std::size_t>(l)] * embs[static_cast<std::size_t>(l)].transpose();
      theta.col(l) = Eigen::Map<const Eigen::VectorXd>(proj.data(), 16 * 16);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(theta, Eigen::ComputeThinV);
    const Eigen::MatrixXd rows = svd.matrixV().leftCols(2);
    const auto oracle = dimple::approx_kmeans(rows, 2, {}, seed);

    CHECK(testutil::same_partition(res.partition.labels, oracle.labels));

    // the Gram eigenvalues are the squared singular values
    for (Eigen::Index j = 0; j < 8; ++j) {
      const double sv2 = svd.singularValues()[j] * svd.singularValues()[j];
      CHECK(res.gram_spectrum.values[j] == doctest::Approx(sv2).epsilon(1e-8));
    }
  }
}

TEST_CASE("between-layer grouping recovers the planted layer groups exactly") {
  DimpleConfig cfg = testutil::small_config(7, 24, 10, 3, 2);
  cfg.edge_lo = 0.1;
  const GroundTruth t = generate_block_truth(cfg);
  const auto res = dimple::between_layer_cluster(
      t.probabilities.layers, std::vector<Eigen::Index>(10, 2), 3, {}, 4);
  CHECK(testutil::same_partition(res.partition.labels, t.layer_labels));
  CHECK(res.embedding.rows() == 10);
  CHECK(res.embedding.cols() == 3);
  CHECK_NOTHROW(res.partition.validate());
}

TEST_CASE("bias_adjusted_square hand values") {
  // triangle: squaring and removing the degree diagonal gives back the
  // adjacency itself
  Eigen::MatrixXd tri = Eigen::MatrixXd::Ones(3, 3) - Eigen::MatrixXd::Identity(3, 3);
  CHECK((dimple::bias_adjusted_square(tri) - tri).cwiseAbs().maxCoeff() == 0.0);

  // path on three nodes: only the endpoint pair shares a neighbour
  Eigen::MatrixXd path = Eigen::MatrixXd::Zero(3, 3);
  path(0, 1) = path(1, 0) = 1.0;
  path(1, 2) = path(2, 1) = 1.0;
  Eigen::MatrixXd want = Eigen::MatrixXd::Zero(3, 3);
  want(0, 2) = want(2, 0) = 1.0;
  CHECK((dimple::bias_adjusted_square(path) - want).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("bias_adjusted_square equals the common-neighbour count oracle") {
  DimpleConfig cfg = testutil::small_config(44, 15, 1, 1, 2);
  const GroundTruth t = generate_block_truth(cfg);
  const MultiplexNetwork net = dimple::sample_adjacency(t, 44);
  const Eigen::MatrixXd& a = net.layers[0];
  const Eigen::MatrixXd g = dimple::bias_adjusted_square(a);
  for (Eigen::Index i = 0; i < 15; ++i) {
    for (Eigen::Index j = 0; j < 15; ++j) {
      double want = 0.0;
      if (i != j) {
        for (Eigen::Index k = 0; k < 15; ++k) want += a(i, k) * a(k, j);
      }
      CHECK(g(i, j) == want);
    }
  }
}

TEST_CASE("bias_adjusted_square validation") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(4, 4);
  a(0, 1) = a(1, 0) = 1.0;
  CHECK_NOTHROW(dimple::bias_adjusted_square(a));
  Eigen::MatrixXd weighted = a;
  weighted(2, 3) = weighted(3, 2) = 0.5;
  CHECK_THROWS_AS(dimple::bias_adjusted_square(weighted), dimple::data_error);
  Eigen::MatrixXd loop = a;
  loop(2, 2) = 1.0;
  CHECK_THROWS_AS(dimple::bias_adjusted_square(loop), dimple::data_error);
  Eigen::MatrixXd asym = a;
  asym(0, 2) = 1.0;
  CHECK_THROWS_AS(dimple::bias_adjusted_square(asym), dimple::data_error);
}

TEST_CASE("aggregate_groups scales group sums by the square root of the group size") {
  std::vector<Eigen::MatrixXd> squares;
  squares.push_back(testutil::random_symmetric(5, 1));
  squares.push_back(testutil::random_symmetric(5, 2));
  squares.push_back(testutil::random_symmetric(5, 3));
  LayerPartition part;
  part.num_groups = 2;
  part.labels = {0, 1, 0};
  const auto h = dimple::aggregate_groups(squares, part);
  REQUIRE(h.size() == 2);
  const Eigen::MatrixXd want0 = (squares[0] + squares[2]) / std::sqrt(2.0);
  CHECK((h[0] - want0).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK((h[1] - squares[1]).cwiseAbs().maxCoeff() <= 1e-14);

  LayerPartition bad;
  bad.num_groups = 2;
  bad.labels = {0, 1};  // two labels for three layers
  CHECK_THROWS_AS(dimple::aggregate_groups(squares, bad), dimple::config_error);
}

TEST_CASE("subspaces_from_squares recovers planted bases from exact squares") {
  DimpleConfig cfg = testutil::small_config(21, 30, 8, 2, 3);
  cfg.edge_lo = 0.1;
  const GroundTruth t = generate_gdpg_truth(cfg);
  std::vector<Eigen::MatrixXd> squares;
  for (const auto& p : t.probabilities.layers) squares.push_back(p * p);
  LayerPartition part;
  part.num_groups = 2;
  part.labels = t.layer_labels;
  const SubspaceSet sub = dimple::subspaces_from_squares(squares, part, t.group_dims);
  REQUIRE(sub.num_groups() == 2);
  for (int m = 0; m < 2; ++m) {
    const auto d = dimple::sin_theta(sub.bases[static_cast<std::size_t>(m)],
                                     t.bases[static_cast<std::size_t>(m)]);
    CHECK(d.frobenius <= 1e-7);
    const auto& vals = sub.leading_values[static_cast<std::size_t>(m)];
    REQUIRE(vals.size() == 3);
    for (Eigen::Index j = 0; j < 3; ++j) CHECK(vals[j] > 0.0);
  }
}

TEST_CASE("subspaces_from_squares names a rank-deficient group") {
  std::vector<Eigen::MatrixXd> squares{Eigen::MatrixXd::Zero(6, 6)};
  LayerPartition part;
  part.num_groups = 1;
  part.labels = {0};
  try {
    dimple::subspaces_from_squares(squares, part, {2});
    FAIL("expected a numeric_error");
  } catch (const dimple::numeric_error& e) {
    CHECK(std::string(e.what()).find("group 0") != std::string::npos);
  }
}

TEST_CASE("within_layer_cluster is exact on planted membership bases") {
  DimpleConfig cfg = testutil::small_config(61, 24, 4, 2, 3);
  cfg.edge_lo = 0.1;
  const GroundTruth t = generate_block_truth(cfg);
  SubspaceSet sub;
  sub.bases = t.bases;
  sub.leading_values.resize(t.bases.size());
  const auto nodes = dimple::within_layer_cluster(sub, {}, 5);
  REQUIRE(nodes.labels.size() == 2);
  for (int m = 0; m < 2; ++m) {
    CHECK(nodes.num_communities[static_cast<std::size_t>(m)] == 3);
    CHECK(testutil::same_partition(nodes.labels[static_cast<std::size_t>(m)],
                                   t.node_labels[static_cast<std::size_t>(m)]));
  }
}

TEST_CASE("exact-squares fit recovers a noiseless instance end to end") {
  DimpleConfig cfg = testutil::small_config(77, 21, 9, 3, 3);
  cfg.edge_lo = 0.1;
  const GroundTruth t = generate_block_truth(cfg);
  FitOptions opt;
  opt.exact_squares = true;
  std::vector<Eigen::Index> ambient(9);
  for (Eigen::Index l = 0; l < 9; ++l) {
    ambient[static_cast<std::size_t>(l)] =
        t.group_dims[static_cast<std::size_t>(t.layer_labels[static_cast<std::size_t>(l)])];
  }
  const FitResult fit = dimple::fit_layers(t.probabilities.layers, ambient, 3, {3}, opt, 12);

  CHECK(testutil::same_partition(fit.layers.labels, t.layer_labels));
  REQUIRE(fit.nodes.has_value());
  REQUIRE(fit.subspaces.num_groups() == 3);

  // match estimated groups to planted groups through the layer partition,
  // then communities must agree inside every group
  for (int tm = 0; tm < 3; ++tm) {
    Eigen::Index l0 = -1;
    for (Eigen::Index l = 0; l < 9; ++l) {
      if (t.layer_labels[static_cast<std::size_t>(l)] == tm) {
        l0 = l;
        break;
      }
    }
    REQUIRE(l0 >= 0);
    const int em = fit.layers.labels[static_cast<std::size_t>(l0)];
    const auto d = dimple::sin_theta(fit.subspaces.bases[static_cast<std::size_t>(em)],
                                     t.bases[static_cast<std::size_t>(tm)]);
    CHECK(d.frobenius <= 1e-8);
    CHECK(testutil::same_partition(fit.nodes->labels[static_cast<std::size_t>(em)],
                                   t.node_labels[static_cast<std::size_t>(tm)]));
  }
}

TEST_CASE("fit widths follow the estimated group sizes in decreasing order") {
  // seven layers with a three-community structure, two layers with a
  // two-community structure on twelve nodes; exact probabilities make the
  // layer split unambiguous
  const Eigen::Index n = 12;
  std::vector<int> za(static_cast<std::size_t>(n)), zb(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    za[static_cast<std::size_t>(i)] = static_cast<int>(i / 4);  // thirds
    zb[static_cast<std::size_t>(i)] = static_cast<int>(i / 6);  // halves
  }
  Eigen::MatrixXd ba(3, 3), bb(2, 2);
  ba << 0.8, 0.1, 0.2, 0.1, 0.7, 0.15, 0.2, 0.15, 0.6;
  bb << 0.75, 0.1, 0.1, 0.65;
  std::vector<Eigen::MatrixXd> layers;
  std::vector<Eigen::Index> ambient;
  for (int r = 0; r < 7; ++r) {
    layers.push_back(block_probabilities(za, Eigen::MatrixXd(ba * (1.0 - 0.05 * r))));
    ambient.push_back(3);
  }
  for (int r = 0; r < 2; ++r) {
    layers.push_back(block_probabilities(zb, Eigen::MatrixXd(bb * (1.0 - 0.1 * r))));
    ambient.push_back(2);
  }
  FitOptions opt;
  opt.exact_squares = true;
  const FitResult fit = dimple::fit_layers(layers, ambient, 2, {3, 2}, opt, 9);

  const auto sizes = fit.layers.group_sizes();
  REQUIRE(sizes.size() == 2);
  for (int g = 0; g < 2; ++g) {
    const Eigen::Index want = sizes[static_cast<std::size_t>(g)] == 7 ? 3 : 2;
    CHECK(fit.group_dims[static_cast<std::size_t>(g)] == want);
    CHECK(fit.subspaces.bases[static_cast<std::size_t>(g)].cols() == want);
    CHECK(fit.nodes->num_communities[static_cast<std::size_t>(g)] == static_cast<int>(want));
  }
  // the seven-layer group carries the three-community structure
  std::set<Eigen::Index> seen(sizes.begin(), sizes.end());
  CHECK(seen == std::set<Eigen::Index>{2, 7});
}

TEST_CASE("subspaces_only skips node clustering") {
  DimpleConfig cfg = testutil::small_config(91, 18, 4, 2, 2);
  cfg.edge_lo = 0.1;
  const GroundTruth t = generate_block_truth(cfg);
  const MultiplexNetwork net = dimple::sample_adjacency(t, 91);
  FitOptions opt;
  opt.subspaces_only = true;
  const FitResult fit = dimple::fit_multiplex(net, 2, {2}, opt, 3);
  CHECK_FALSE(fit.nodes.has_value());
  CHECK(fit.subspaces.num_groups() == 2);
}

TEST_CASE("fit is deterministic in the seed") {
  DimpleConfig cfg = testutil::small_config(14, 20, 6, 2, 2);
  const GroundTruth t = generate_block_truth(cfg);
  const MultiplexNetwork net = dimple::sample_adjacency(t, 14);
  const FitResult a = dimple::fit_multiplex(net, 2, {2}, {}, 5);
  const FitResult b = dimple::fit_multiplex(net, 2, {2}, {}, 5);
  CHECK(a.layers.labels == b.layers.labels);
  CHECK(a.gram_spectrum.values == b.gram_spectrum.values);
  for (Eigen::Index m = 0; m < a.subspaces.num_groups(); ++m) {
    CHECK(a.subspaces.bases[static_cast<std::size_t>(m)] ==
          b.subspaces.bases[static_cast<std::size_t>(m)]);
  }
  REQUIRE(a.nodes.has_value());
  REQUIRE(b.nodes.has_value());
  CHECK(a.nodes->labels == b.nodes->labels);
}

TEST_CASE("relabeling nodes permutes the fitted communities consistently") {
  DimpleConfig cfg = testutil::small_config(28, 18, 6, 2, 3);
  cfg.edge_lo = 0.1;
  const GroundTruth t = generate_block_truth(cfg);
  FitOptions opt;
  opt.exact_squares = true;
  std::vector<Eigen::Index> ambient(6, 3);

  // reverse the node order
  const Eigen::Index n = cfg.n;
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = n - 1 - i;
  std::vector<Eigen::MatrixXd> permuted;
  for (const auto& p : t.probabilities.layers) {
    Eigen::MatrixXd q(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        q(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]) = p(i, j);
      }
    }
    permuted.push_back(std::move(q));
  }

  const FitResult base = dimple::fit_layers(t.probabilities.layers, ambient, 2, {3}, opt, 6);
  const FitResult moved = dimple::fit_layers(permuted, ambient, 2, {3}, opt, 6);

  CHECK(testutil::same_partition(base.layers.labels, moved.layers.labels));
  REQUIRE(base.nodes.has_value());
  REQUIRE(moved.nodes.has_value());
  // groups may be numbered differently; align them through the layer labels
  for (int g = 0; g < 2; ++g) {
    Eigen::Index l0 = -1;
    for (Eigen::Index l = 0; l < 6; ++l) {
      if (base.layers.labels[static_cast<std::size_t>(l)] == g) {
        l0 = l;
        break;
      }
    }
    REQUIRE(l0 >= 0);
    const int g2 = moved.layers.labels[static_cast<std::size_t>(l0)];
    const auto& za = base.nodes->labels[static_cast<std::size_t>(g)];
    const auto& zb = moved.nodes->labels[static_cast<std::size_t>(g2)];
    std::vector<int> zb_back(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
      zb_back[static_cast<std::size_t>(i)] = zb[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];
    }
    CHECK(testutil::same_partition(za, zb_back));
  }
}
