#include "dimple/network.hpp"

#include <string>

namespace dimple {

std::vector<Eigen::Index> DimpleConfig::group_dims() const {
  require_config(!K.empty(), "config: K must have at least one entry");
  if (static_cast<Eigen::Index>(K.size()) == M) return K;
  require_config(K.size() == 1, "config: K must have one entry per group, or a single entry");
  return std::vector<Eigen::Index>(static_cast<std::size_t>(M), K[0]);
}

void DimpleConfig::validate(ModelKind kind) const {
  require_config(n >= 2, "config: need at least two nodes");
  require_config(L >= 1, "config: need at least one layer");
  require_config(M >= 1 && M <= L, "config: number of groups must be in [1, L]");
  const auto dims = group_dims();
  for (Eigen::Index k : dims) {
    require_config(k >= 1 && k < n, "config: community counts must be in [1, n)");
  }
  require_config(edge_lo >= 0.0 && edge_lo <= edge_hi && edge_hi <= 1.0,
                 "config: connection strengths must satisfy 0 <= lo <= hi <= 1");
  require_config(offdiag_scale >= 0.0, "config: off-diagonal scale must be non-negative");
  require_config(offdiag_scale * edge_hi <= 1.0,
                 "config: scaled connection strengths must stay within [0, 1]");
  if (kind == ModelKind::gdpg) {
    require_config(dirichlet_alpha > 0.0, "config: dirichlet alpha must be positive");
  }
}

NetworkDiagnostics validate_network(const MultiplexNetwork& net) {
  NetworkDiagnostics diag;
  const Eigen::Index L = net.num_layers();
  diag.densities = Eigen::VectorXd::Zero(L);
  auto flag = [&diag](const std::string& msg) {
    diag.ok = false;
    if (diag.problems.size() < 100) diag.problems.push_back(msg);
  };

  if (net.n < 2) flag("network has fewer than two nodes");
  if (L == 0) flag("network has no layers");
  if (static_cast<Eigen::Index>(net.ambient_dims.size()) != L)
    flag("ambient_dims count does not match layer count");
  if (!net.layer_names.empty() && static_cast<Eigen::Index>(net.layer_names.size()) != L)
    flag("layer_names count does not match layer count");
  for (std::size_t x = 0; x < net.ambient_dims.size(); ++x) {
    const Eigen::Index k = net.ambient_dims[x];
    if (k < 1 || k >= net.n)
      flag("layer " + std::to_string(x) + ": ambient dimension " + std::to_string(k) +
           " outside [1, n)");
  }

  for (Eigen::Index l = 0; l < L; ++l) {
    const auto& a = net.layers[static_cast<std::size_t>(l)];
    const std::string tag = "layer " + std::to_string(l) + ": ";
    if (a.rows() != net.n || a.cols() != net.n) {
      flag(tag + "wrong shape");
      continue;
    }
    Eigen::Index selfloops = 0, nonbinary = 0, asym = 0, edges = 0;
    for (Eigen::Index i = 0; i < net.n; ++i) {
      if (a(i, i) != 0.0) {
        ++selfloops;
        if (selfloops == 1) flag(tag + "self-loop at node " + std::to_string(i));
      }
      for (Eigen::Index j = i; j < net.n; ++j) {
        const double v = a(i, j);
        if (v != 0.0 && v != 1.0) {
          ++nonbinary;
          if (nonbinary == 1)
            flag(tag + "non-binary entry at (" + std::to_string(i) + ", " + std::to_string(j) +
                 ")");
        }
        if (a(i, j) != a(j, i)) {
          ++asym;
          if (asym == 1)
            flag(tag + "asymmetric pair (" + std::to_string(i) + ", " + std::to_string(j) + ")");
        }
        if (i < j && v == 1.0) ++edges;
      }
    }
    if (selfloops > 1) flag(tag + std::to_string(selfloops) + " self-loops in total");
    if (nonbinary > 1) flag(tag + std::to_string(nonbinary) + " non-binary entries in total");
    if (asym > 1) flag(tag + std::to_string(asym) + " asymmetric pairs in total");
    diag.densities[l] =
        net.n >= 2 ? static_cast<double>(edges) / (0.5 * static_cast<double>(net.n) *
                                                   static_cast<double>(net.n - 1))
                   : 0.0;
  }
  return diag;
}

}  // namespace dimple
