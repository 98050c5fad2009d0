#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dimple/kmeans.hpp"
#include "dimple/linalg.hpp"
#include "dimple/network.hpp"

// The three-stage estimation pipeline for diverse multiplex networks:
//   1. between-layer clustering -- group layers whose leading eigenspaces
//      align, via the L x L subspace-alignment Gram matrix (computed without
//      ever materializing the n^2 x L matrix of vectorized projections, whose
//      Gram it equals exactly);
//   2. subspace estimation -- per group, eigenvectors of the sum of
//      bias-adjusted squared adjacencies;
//   3. within-layer clustering -- communities from the rows of each group
//      basis (block models).

namespace dimple {

// assignment of layers to groups; every group non-empty
struct LayerPartition {
  int num_groups = 0;
  std::vector<int> labels;  // size L, values in [0, num_groups)

  Eigen::Index num_layers() const { return static_cast<Eigen::Index>(labels.size()); }
  std::vector<Eigen::Index> group_sizes() const;
  void validate() const;
};

// per-group community assignment of the nodes
struct NodePartition {
  std::vector<std::vector<int>> labels;  // per group, size n, values in [0, K_m)
  std::vector<int> num_communities;      // K_m per group
};

// per-group orthonormal basis of the estimated invariant subspace
struct SubspaceSet {
  std::vector<Eigen::MatrixXd> bases;          // n x K_m, orthonormal columns
  std::vector<Eigen::VectorXd> leading_values; // the K_m leading eigenvalues used

  Eigen::Index num_groups() const { return static_cast<Eigen::Index>(bases.size()); }
};

struct FitOptions {
  KMeansOptions kmeans;
  // stop after subspace estimation (latent-position models have no discrete
  // communities to recover)
  bool subspaces_only = false;
  // treat layers as exact symmetric matrices: square them directly instead of
  // applying the binary-adjacency bias adjustment
  bool exact_squares = false;
};

struct BetweenLayerResult {
  LayerPartition partition;
  SpectrumXd gram_spectrum;     // full spectrum of the L x L alignment Gram matrix
  Eigen::MatrixXd embedding;    // L x M rows fed to k-means
};

struct FitResult {
  LayerPartition layers;
  SpectrumXd gram_spectrum;
  SubspaceSet subspaces;
  std::optional<NodePartition> nodes;
  std::vector<Eigen::Index> group_dims;  // K_m per estimated group
};

// leading-eigenvector basis of each layer; layer l keeps dims[l] eigenvectors
// of its (symmetric) matrix; degenerate layers raise numeric_error naming the
// layer
std::vector<Eigen::MatrixXd> layer_embeddings(const std::vector<Eigen::MatrixXd>& layers,
                                              const std::vector<Eigen::Index>& dims);
std::vector<Eigen::MatrixXd> layer_embeddings(const MultiplexNetwork& net);

// stage 1 on arbitrary symmetric layers (probabilities or adjacencies)
BetweenLayerResult between_layer_cluster(const std::vector<Eigen::MatrixXd>& layers,
                                         const std::vector<Eigen::Index>& dims, int num_groups,
                                         const KMeansOptions& opt, std::uint64_t seed);
BetweenLayerResult between_layer_cluster(const MultiplexNetwork& net, int num_groups,
                                         const KMeansOptions& opt, std::uint64_t seed);

// A*A - diag(A*1): the squared adjacency with its diagonal sampling bias
// removed, so off-diagonal expectations match the squared edge-probability
// matrix; requires a binary symmetric zero-diagonal input
Eigen::MatrixXd bias_adjusted_square(const Eigen::MatrixXd& a);

// per-group aggregation: H^(m) = |group m|^{-1/2} * sum of that group's
// squared layers
std::vector<Eigen::MatrixXd> aggregate_groups(const std::vector<Eigen::MatrixXd>& squared_layers,
                                              const LayerPartition& part);

// stage 2 from precomputed squared layers (also the exact-probability entry
// point used by tests and the noiseless pipeline)
SubspaceSet subspaces_from_squares(const std::vector<Eigen::MatrixXd>& squared_layers,
                                   const LayerPartition& part,
                                   const std::vector<Eigen::Index>& group_dims);

// stage 2 from the observed network (bias-adjusted squares underneath)
SubspaceSet estimate_subspaces(const MultiplexNetwork& net, const LayerPartition& part,
                               const std::vector<Eigen::Index>& group_dims);

// stage 3: cluster the rows of each group basis into K_m communities
NodePartition within_layer_cluster(const SubspaceSet& subspaces, const KMeansOptions& opt,
                                   std::uint64_t seed);

// full pipeline.  group_dims holds one K per group (or a single K broadcast to
// all groups); entries are matched to estimated groups by decreasing group
// size, ties to the smaller group label.
FitResult fit_layers(const std::vector<Eigen::MatrixXd>& layers,
                     const std::vector<Eigen::Index>& ambient_dims, int num_groups,
                     std::vector<Eigen::Index> group_dims, const FitOptions& opt,
                     std::uint64_t seed);
FitResult fit_multiplex(const MultiplexNetwork& net, int num_groups,
                        std::vector<Eigen::Index> group_dims, const FitOptions& opt,
                        std::uint64_t seed);

}  // namespace dimple
