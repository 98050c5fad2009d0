#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "dimple/fit.hpp"
#include "dimple/metrics.hpp"
#include "dimple/network.hpp"

// On-disk formats (all plain UTF-8 text, '#' starts a comment, writers are
// deterministic so identical inputs give byte-identical files):
//
//   network directory
//     manifest.txt      key/value lines: format, kind (binary|weighted), n, L,
//                       ambient_dims, layer_files, optional layer_names
//     layer_KKK.edges   one edge per line; binary layers: "i j" with 0-based
//                       node ids and i < j; weighted layers: "i j w" with
//                       i <= j (symmetric value) and shortest round-trip reals
//
//   results directory (write_results)
//     summary.csv       one row of fit dimensions and error metrics
//     layer_labels.txt  1-based group label per layer
//     gram_spectrum.txt eigenvalues of the layer-alignment Gram matrix
//     group_KK/         per estimated group: basis.txt (n x K_m matrix),
//                       h_spectrum.txt, node_labels.txt (1-based, block fits)
//
//   label files are written 1-based and loaded back 0-based.

namespace dimple {

struct NetworkManifest {
  std::string kind;  // "binary" or "weighted"
  Eigen::Index n = 0;
  std::vector<std::string> layer_files;
  std::vector<Eigen::Index> ambient_dims;
  std::vector<std::string> layer_names;  // empty or one per layer
};

// one directed weighted record; self-pairs allowed, duplicates accumulate
struct WeightedEdge {
  Eigen::Index i = 0;
  Eigen::Index j = 0;
  double w = 0.0;
};

struct WeightedEdgeList {
  Eigen::Index n = 0;
  std::vector<WeightedEdge> edges;
};

// ---- network directories ----

void save_network(const MultiplexNetwork& net, const std::string& dir);
MultiplexNetwork load_network(const std::string& dir);

// real symmetric layers stored as "i j w" upper-triangle records
void save_weighted_network(const SymmetricLayers& layers, const std::string& dir);
SymmetricLayers load_weighted_network(const std::string& dir);

// ---- weighted ingestion ----

// directed weighted records from an edge file ("i j w" lines, any order)
WeightedEdgeList load_weighted_edges(const std::string& path, Eigen::Index n);

// symmetrize (w(i,j) + w(j,i)) and threshold per layer: edge iff the combined
// weight reaches thresholds[l]; diagonal forced to zero; ambient_dims default
// to 1 per layer until the caller sets real values
MultiplexNetwork binarize_weighted(const std::vector<WeightedEdgeList>& lists,
                                   const std::vector<double>& thresholds);

// total incident weight per node, summed over all lists and both directions
Eigen::VectorXd total_node_weights(const std::vector<WeightedEdgeList>& lists);

// keep nodes whose total incident weight is at least min_total; edges touching
// dropped nodes disappear; returns the node reindexing via kept_ids
std::vector<WeightedEdgeList> filter_by_total_weight(const std::vector<WeightedEdgeList>& lists,
                                                     double min_total,
                                                     std::vector<Eigen::Index>* kept_ids);

// ---- fit results ----

void write_results(const FitResult& fit, const std::optional<ErrorReport>& report,
                   const std::string& dir);

// labels written by write_results / truth writers, converted back to 0-based
std::vector<int> load_labels(const std::string& path);

// dense numeric text matrix (space-separated rows)
void save_matrix(const Eigen::MatrixXd& m, const std::string& path);
Eigen::MatrixXd load_matrix(const std::string& path);

// ---- ground truth (for scoring a fit against a generated instance) ----

void save_truth(const GroundTruth& truth, const std::string& dir);
GroundTruth load_truth(const std::string& dir);

// shortest round-trip decimal form of a double (deterministic)
std::string format_double(double v);

}  // namespace dimple
