#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "dimple/common.hpp"

// Domain types for diverse multiplex networks: L undirected layers on a shared
// node set, layers partitioned into M groups; layers in group m share a common
// invariant subspace (for block models, a common community structure).

namespace dimple {

enum class ModelKind { block, gdpg };

// observed data: binary symmetric adjacency per layer, zero diagonal
struct MultiplexNetwork {
  Eigen::Index n = 0;
  std::vector<Eigen::MatrixXd> layers;
  // per-layer embedding dimension K^(l) used by the spectral pipeline
  std::vector<Eigen::Index> ambient_dims;
  // optional layer names (empty, or one per layer; no whitespace)
  std::vector<std::string> layer_names;

  Eigen::Index num_layers() const { return static_cast<Eigen::Index>(layers.size()); }
};

// real symmetric layers (edge probabilities, or weighted data); same shape as
// MultiplexNetwork but entries are not restricted to {0,1}
struct SymmetricLayers {
  Eigen::Index n = 0;
  std::vector<Eigen::MatrixXd> layers;
  std::vector<Eigen::Index> ambient_dims;
  std::vector<std::string> layer_names;

  Eigen::Index num_layers() const { return static_cast<Eigen::Index>(layers.size()); }
};

// per-layer connection probability matrices P^(l), symmetric, entries in [0,1]
struct ProbabilityTensor {
  Eigen::Index n = 0;
  std::vector<Eigen::MatrixXd> layers;

  Eigen::Index num_layers() const { return static_cast<Eigen::Index>(layers.size()); }
};

// planted structure a generator produced and an estimator tries to recover
struct GroundTruth {
  ModelKind kind = ModelKind::block;
  Eigen::Index n = 0;
  Eigen::Index num_groups = 0;
  std::vector<int> layer_labels;              // size L, values in [0, M)
  std::vector<Eigen::Index> group_dims;       // K_m per group
  std::vector<std::vector<int>> node_labels;  // per group, size n (block model only)
  std::vector<Eigen::MatrixXd> latent;        // per group X^(m), n x K_m (gdpg only)
  std::vector<Eigen::MatrixXd> bases;         // per group orthonormal V^(m), n x K_m
  std::vector<Eigen::MatrixXd> connectivity;  // per layer B^(l), K_m x K_m, m = group of l
  ProbabilityTensor probabilities;

  Eigen::Index num_layers() const { return static_cast<Eigen::Index>(layer_labels.size()); }
};

// generator settings shared by the block model and the gdpg variant
struct DimpleConfig {
  Eigen::Index n = 0;
  Eigen::Index L = 0;
  Eigen::Index M = 0;
  std::vector<Eigen::Index> K;  // one entry per group, or a single entry to broadcast
  double edge_lo = 0.0;         // connection strengths drawn uniformly in [edge_lo, edge_hi]
  double edge_hi = 1.0;
  double offdiag_scale = 1.0;   // between-community strengths scaled by this factor
  double dirichlet_alpha = 0.1; // latent-position concentration (gdpg only)
  std::uint64_t seed = 0;

  // K expanded to one entry per group
  std::vector<Eigen::Index> group_dims() const;
  void validate(ModelKind kind) const;
};

struct NetworkDiagnostics {
  bool ok = true;
  std::vector<std::string> problems;  // human-readable, with layer/node indices
  Eigen::VectorXd densities;          // per layer: edges / (n choose 2)
};

// structural audit of an observed network: symmetry, binary entries, zero
// diagonal, dimension consistency; never throws on content problems
NetworkDiagnostics validate_network(const MultiplexNetwork& net);

}  // namespace dimple
