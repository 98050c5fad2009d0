#include "dimple/fit.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "dimple/rng.hpp"

namespace dimple {

std::vector<Eigen::Index> LayerPartition::group_sizes() const {
  std::vector<Eigen::Index> sizes(static_cast<std::size_t>(num_groups), 0);
  for (int z : labels) ++sizes[static_cast<std::size_t>(z)];
  return sizes;
}

void LayerPartition::validate() const {
  require_config(num_groups >= 1, "layer partition: need at least one group");
  require_config(!labels.empty(), "layer partition: no layers");
  for (int z : labels) {
    require_config(z >= 0 && z < num_groups, "layer partition: label out of range");
  }
  for (Eigen::Index s : group_sizes()) {
    require_config(s >= 1, "layer partition: empty group");
  }
}

namespace {

void check_layer_stack(const std::vector<Eigen::MatrixXd>& layers,
                       const std::vector<Eigen::Index>& dims) {
  require_config(!layers.empty(), "fit: no layers");
  require_config(layers.size() == dims.size(), "fit: one embedding dimension per layer required");
  const Eigen::Index n = layers[0].rows();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    require_data(layers[l].rows() == n && layers[l].cols() == n,
                 "fit: layer " + std::to_string(l) + " has inconsistent shape");
    require_config(dims[l] >= 1 && dims[l] < n,
                   "fit: layer " + std::to_string(l) + " needs an embedding dimension in [1, n)");
  }
}

}  // namespace

std::vector<Eigen::MatrixXd> layer_embeddings(const std::vector<Eigen::MatrixXd>& layers,
                                              const std::vector<Eigen::Index>& dims) {
  check_layer_stack(layers, dims);
  std::vector<Eigen::MatrixXd> bases;
  bases.reserve(layers.size());
  for (std::size_t l = 0; l < layers.size(); ++l) {
    SpectrumXd spec;
    try {
      spec = sym_eigs_topk(layers[l], dims[l]);
    } catch (const data_error& e) {
      throw data_error("layer " + std::to_string(l) + ": " + e.what());
    }
    const double scale = std::max(1.0, std::abs(spec.values[0]));
    require_numeric(std::abs(spec.values[dims[l] - 1]) > 1e-12 * scale,
                    "layer " + std::to_string(l) + ": fewer than " + std::to_string(dims[l]) +
                        " nonzero eigenvalues (degenerate layer)");
    bases.push_back(std::move(spec.vectors));
  }
  return bases;
}

std::vector<Eigen::MatrixXd> layer_embeddings(const MultiplexNetwork& net) {
  return layer_embeddings(net.layers, net.ambient_dims);
}

BetweenLayerResult between_layer_cluster(const std::vector<Eigen::MatrixXd>& layers,
                                         const std::vector<Eigen::Index>& dims, int num_groups,
                                         const KMeansOptions& opt, std::uint64_t seed) {
  check_layer_stack(layers, dims);
  const auto L = static_cast<Eigen::Index>(layers.size());
  require_config(num_groups >= 1 && num_groups <= L,
                 "between-layer clustering: group count must be in [1, L]");

  const auto bases = layer_embeddings(layers, dims);
  const Eigen::MatrixXd gram = gram_from_bases(bases);
  require_numeric(gram.trace() > 0.0, "between-layer clustering: degenerate alignment matrix");

  BetweenLayerResult out;
  out.gram_spectrum = sym_eigs_topk(gram, L);
  out.embedding = out.gram_spectrum.vectors.leftCols(num_groups);

  const auto km = approx_kmeans(out.embedding, num_groups, opt, seed);
  out.partition.num_groups = num_groups;
  out.partition.labels = km.labels;
  out.partition.validate();
  return out;
}

BetweenLayerResult between_layer_cluster(const MultiplexNetwork& net, int num_groups,
                                         const KMeansOptions& opt, std::uint64_t seed) {
  return between_layer_cluster(net.layers, net.ambient_dims, num_groups, opt, seed);
}

Eigen::MatrixXd bias_adjusted_square(const Eigen::MatrixXd& a) {
  const Eigen::Index n = a.rows();
  require_data(a.cols() == n && n >= 1, "bias-adjusted square: matrix must be square");
  for (Eigen::Index i = 0; i < n; ++i) {
    require_data(a(i, i) == 0.0, "bias-adjusted square: nonzero diagonal at node " +
                                     std::to_string(i));
    for (Eigen::Index j = i + 1; j < n; ++j) {
      require_data(a(i, j) == 0.0 || a(i, j) == 1.0,
                   "bias-adjusted square: non-binary entry at (" + std::to_string(i) + ", " +
                       std::to_string(j) + ")");
      require_data(a(i, j) == a(j, i), "bias-adjusted square: asymmetric pair (" +
                                           std::to_string(i) + ", " + std::to_string(j) + ")");
    }
  }
  Eigen::MatrixXd g = a * a;
  g.diagonal() -= a.rowwise().sum();
  return g;
}

std::vector<Eigen::MatrixXd> aggregate_groups(const std::vector<Eigen::MatrixXd>& squared_layers,
                                              const LayerPartition& part) {
  part.validate();
  require_config(squared_layers.size() == part.labels.size(),
                 "aggregate: partition covers a different layer count");
  const Eigen::Index n = squared_layers[0].rows();
  const auto sizes = part.group_sizes();
  std::vector<Eigen::MatrixXd> h(static_cast<std::size_t>(part.num_groups),
                                 Eigen::MatrixXd::Zero(n, n));
  for (std::size_t l = 0; l < squared_layers.size(); ++l) {
    require_data(squared_layers[l].rows() == n && squared_layers[l].cols() == n,
                 "aggregate: layer " + std::to_string(l) + " has inconsistent shape");
    h[static_cast<std::size_t>(part.labels[l])] += squared_layers[l];
  }
  for (int m = 0; m < part.num_groups; ++m) {
    h[static_cast<std::size_t>(m)] /= std::sqrt(static_cast<double>(sizes[static_cast<std::size_t>(m)]));
  }
  return h;
}

SubspaceSet subspaces_from_squares(const std::vector<Eigen::MatrixXd>& squared_layers,
                                   const LayerPartition& part,
                                   const std::vector<Eigen::Index>& group_dims) {
  require_config(static_cast<int>(group_dims.size()) == part.num_groups,
                 "subspaces: need one dimension per group");
  const auto h = aggregate_groups(squared_layers, part);
  const Eigen::Index n = h[0].rows();
  SubspaceSet out;
  for (int m = 0; m < part.num_groups; ++m) {
    const Eigen::Index k = group_dims[static_cast<std::size_t>(m)];
    require_config(k >= 1 && k <= n, "subspaces: group " + std::to_string(m) +
                                         " dimension outside [1, n]");
    auto spec = sym_eigs_topk(h[static_cast<std::size_t>(m)], k);
    const double scale = std::max(1.0, std::abs(spec.values[0]));
    require_numeric(std::abs(spec.values[k - 1]) > 1e-12 * scale,
                    "group " + std::to_string(m) + ": aggregated matrix has fewer than " +
                        std::to_string(k) + " nonzero eigenvalues");
    out.bases.push_back(std::move(spec.vectors));
    out.leading_values.push_back(std::move(spec.values));
  }
  return out;
}

SubspaceSet estimate_subspaces(const MultiplexNetwork& net, const LayerPartition& part,
                               const std::vector<Eigen::Index>& group_dims) {
  std::vector<Eigen::MatrixXd> squares;
  squares.reserve(net.layers.size());
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    try {
      squares.push_back(bias_adjusted_square(net.layers[l]));
    } catch (const data_error& e) {
      throw data_error("layer " + std::to_string(l) + ": " + e.what());
    }
  }
  return subspaces_from_squares(squares, part, group_dims);
}

NodePartition within_layer_cluster(const SubspaceSet& subspaces, const KMeansOptions& opt,
                                   std::uint64_t seed) {
  require_config(subspaces.num_groups() >= 1, "within-layer clustering: no subspaces");
  NodePartition out;
  for (Eigen::Index m = 0; m < subspaces.num_groups(); ++m) {
    const auto& basis = subspaces.bases[static_cast<std::size_t>(m)];
    const int k = static_cast<int>(basis.cols());
    const auto km = approx_kmeans(basis, k, opt,
                                  derive_seed(seed, {kFitStream, 2, static_cast<std::uint64_t>(m)}));
    out.labels.push_back(km.labels);
    out.num_communities.push_back(k);
  }
  return out;
}

FitResult fit_layers(const std::vector<Eigen::MatrixXd>& layers,
                     const std::vector<Eigen::Index>& ambient_dims, int num_groups,
                     std::vector<Eigen::Index> group_dims, const FitOptions& opt,
                     std::uint64_t seed) {
  check_layer_stack(layers, ambient_dims);
  require_config(!group_dims.empty(), "fit: need at least one group dimension");
  if (group_dims.size() == 1 && num_groups > 1) {
    group_dims.assign(static_cast<std::size_t>(num_groups), group_dims[0]);
  }
  require_config(static_cast<int>(group_dims.size()) == num_groups,
                 "fit: need one group dimension per group, or a single one to broadcast");

  FitResult fit;

  // stage 1: group the layers
  {
    auto between = between_layer_cluster(layers, ambient_dims, num_groups, opt.kmeans,
                                         derive_seed(seed, {kFitStream, 1}));
    fit.layers = std::move(between.partition);
    fit.gram_spectrum = std::move(between.gram_spectrum);
  }

  // user-supplied dimensions attach to estimated groups by decreasing size,
  // ties to the smaller group label
  {
    const auto sizes = fit.layers.group_sizes();
    std::vector<int> order(static_cast<std::size_t>(num_groups));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&sizes](int a, int b) {
      return sizes[static_cast<std::size_t>(a)] > sizes[static_cast<std::size_t>(b)];
    });
    std::vector<Eigen::Index> matched(static_cast<std::size_t>(num_groups));
    for (int r = 0; r < num_groups; ++r) {
      matched[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])] =
          group_dims[static_cast<std::size_t>(r)];
    }
    fit.group_dims = std::move(matched);
  }

  // stage 2: per-group subspaces from (bias-adjusted) squared layers
  {
    std::vector<Eigen::MatrixXd> squares;
    squares.reserve(layers.size());
    for (std::size_t l = 0; l < layers.size(); ++l) {
      if (opt.exact_squares) {
        squares.push_back(layers[l] * layers[l]);
      } else {
        try {
          squares.push_back(bias_adjusted_square(layers[l]));
        } catch (const data_error& e) {
          throw data_error("layer " + std::to_string(l) + ": " + e.what());
        }
      }
    }
    fit.subspaces = subspaces_from_squares(squares, fit.layers, fit.group_dims);
  }

  // stage 3: communities from the rows of each group basis
  if (!opt.subspaces_only) {
    fit.nodes = within_layer_cluster(fit.subspaces, opt.kmeans, seed);
  }
  return fit;
}

FitResult fit_multiplex(const MultiplexNetwork& net, int num_groups,
                        std::vector<Eigen::Index> group_dims, const FitOptions& opt,
                        std::uint64_t seed) {
  return fit_layers(net.layers, net.ambient_dims, num_groups, std::move(group_dims), opt, seed);
}

}  // namespace dimple
