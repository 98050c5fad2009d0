#include "dimple/io.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>

#include "text_format.hpp"

namespace dimple {

namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

constexpr const char* kManifestName = "manifest.txt";

std::string layer_file_name(Eigen::Index l, Eigen::Index total) {
  std::string digits = std::to_string(total > 0 ? total - 1 : 0);
  const int width = std::max<int>(3, static_cast<int>(digits.size()));
  std::string num = std::to_string(l);
  return "layer_" + std::string(static_cast<std::size_t>(width) - std::min(num.size(), static_cast<std::size_t>(width)), '0') + num + ".edges";
}

std::string group_dir_name(Eigen::Index m, Eigen::Index total) {
  // groups are numbered 1-based on disk, like every label file
  std::string digits = std::to_string(total);
  const int width = std::max<int>(2, static_cast<int>(digits.size()));
  std::string num = std::to_string(m + 1);
  return "group_" + std::string(static_cast<std::size_t>(width) - std::min(num.size(), static_cast<std::size_t>(width)), '0') + num;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require_data(out.good(), "cannot write " + path);
  return out;
}

void write_manifest(const NetworkManifest& m, const std::string& path) {
  auto out = open_out(path);
  out << "format dimple-network 1\n";
  out << "kind " << m.kind << "\n";
  out << "n " << m.n << "\n";
  out << "L " << m.layer_files.size() << "\n";
  out << "ambient_dims";
  for (Eigen::Index k : m.ambient_dims) out << ' ' << k;
  out << "\n";
  out << "layer_files";
  for (const auto& f : m.layer_files) out << ' ' << f;
  out << "\n";
  if (!m.layer_names.empty()) {
    out << "layer_names";
    for (const auto& s : m.layer_names) out << ' ' << s;
    out << "\n";
  }
  require_data(out.good(), "write failure on " + path);
}

NetworkManifest read_manifest(const std::string& path) {
  NetworkManifest m;
  bool saw_format = false, saw_n = false, saw_dims = false, saw_files = false;
  Eigen::Index declared_l = -1;
  for (const auto& line : textio::read_lines(path)) {
    const std::string where = textio::location(path, line.number);
    const std::string& key = line.tokens[0];
    const std::size_t nvals = line.tokens.size() - 1;
    if (key == "format") {
      require_data(nvals == 2 && line.tokens[1] == "dimple-network" && line.tokens[2] == "1",
                   where + "unsupported format line");
      saw_format = true;
    } else if (key == "kind") {
      require_data(nvals == 1, where + "kind takes one value");
      m.kind = line.tokens[1];
      require_data(m.kind == "binary" || m.kind == "weighted",
                   where + "kind must be binary or weighted");
    } else if (key == "n") {
      require_data(nvals == 1, where + "n takes one value");
      m.n = textio::parse_int(line.tokens[1], where);
      saw_n = true;
    } else if (key == "L") {
      require_data(nvals == 1, where + "L takes one value");
      declared_l = textio::parse_int(line.tokens[1], where);
    } else if (key == "ambient_dims") {
      for (std::size_t t = 1; t < line.tokens.size(); ++t) {
        m.ambient_dims.push_back(textio::parse_int(line.tokens[t], where));
      }
      saw_dims = true;
    } else if (key == "layer_files") {
      m.layer_files.assign(line.tokens.begin() + 1, line.tokens.end());
      saw_files = true;
    } else if (key == "layer_names") {
      m.layer_names.assign(line.tokens.begin() + 1, line.tokens.end());
    } else {
      throw data_error(where + "unknown manifest key '" + key + "'");
    }
  }
  require_data(saw_format, path + ": missing format line");
  require_data(saw_n, path + ": missing n");
  require_data(saw_files && !m.layer_files.empty(), path + ": missing layer_files");
  require_data(saw_dims, path + ": missing ambient_dims");
  if (m.kind.empty()) m.kind = "binary";
  require_data(m.n >= 2, path + ": n must be at least 2");
  require_data(m.ambient_dims.size() == m.layer_files.size(),
               path + ": ambient_dims count does not match layer_files");
  require_data(m.layer_names.empty() || m.layer_names.size() == m.layer_files.size(),
               path + ": layer_names count does not match layer_files");
  require_data(declared_l < 0 || declared_l == static_cast<Eigen::Index>(m.layer_files.size()),
               path + ": L does not match layer_files");
  for (Eigen::Index k : m.ambient_dims) {
    require_data(k >= 1 && k < m.n, path + ": ambient dimension outside [1, n)");
  }
  return m;
}

// binary layer: "i j" lines, 0-based, i < j, no duplicates
Eigen::MatrixXd read_edge_file(const std::string& path, Eigen::Index n) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (const auto& line : textio::read_lines(path)) {
    const std::string where = textio::location(path, line.number);
    require_data(line.tokens.size() == 2, where + "expected 'i j'");
    const long long i = textio::parse_int(line.tokens[0], where);
    const long long j = textio::parse_int(line.tokens[1], where);
    require_data(i >= 0 && i < n && j >= 0 && j < n,
                 where + "node index out of range [0, " + std::to_string(n) + ")");
    require_data(i != j, where + "self-loop (" + std::to_string(i) + " " + std::to_string(j) + ")");
    require_data(i < j, where + "edges must satisfy i < j");
    require_data(a(i, j) == 0.0, where + "duplicate edge (" + std::to_string(i) + " " +
                                     std::to_string(j) + ")");
    a(i, j) = 1.0;
    a(j, i) = 1.0;
  }
  return a;
}

// weighted symmetric layer: "i j w" lines, i <= j, one record per pair
Eigen::MatrixXd read_weighted_layer(const std::string& path, Eigen::Index n) {
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd seen = Eigen::MatrixXd::Zero(n, n);
  for (const auto& line : textio::read_lines(path)) {
    const std::string where = textio::location(path, line.number);
    require_data(line.tokens.size() == 3, where + "expected 'i j w'");
    const long long i = textio::parse_int(line.tokens[0], where);
    const long long j = textio::parse_int(line.tokens[1], where);
    const double w = textio::parse_real(line.tokens[2], where);
    require_data(i >= 0 && i < n && j >= 0 && j < n,
                 where + "node index out of range [0, " + std::to_string(n) + ")");
    require_data(i <= j, where + "symmetric records must satisfy i <= j");
    require_data(seen(i, j) == 0.0, where + "duplicate pair (" + std::to_string(i) + " " +
                                        std::to_string(j) + ")");
    seen(i, j) = 1.0;
    s(i, j) = w;
    s(j, i) = w;
  }
  return s;
}

}  // namespace

void save_network(const MultiplexNetwork& net, const std::string& dir) {
  const auto diag = validate_network(net);
  require_data(diag.ok, "save_network: invalid network: " +
                            (diag.problems.empty() ? std::string("unknown") : diag.problems[0]));
  fs::create_directories(dir);
  const Eigen::Index L = net.num_layers();
  NetworkManifest m;
  m.kind = "binary";
  m.n = net.n;
  m.ambient_dims = net.ambient_dims;
  m.layer_names = net.layer_names;
  for (Eigen::Index l = 0; l < L; ++l) m.layer_files.push_back(layer_file_name(l, L));
  write_manifest(m, (fs::path(dir) / kManifestName).string());

  for (Eigen::Index l = 0; l < L; ++l) {
    auto out = open_out((fs::path(dir) / m.layer_files[static_cast<std::size_t>(l)]).string());
    const auto& a = net.layers[static_cast<std::size_t>(l)];
    for (Eigen::Index i = 0; i < net.n; ++i) {
      for (Eigen::Index j = i + 1; j < net.n; ++j) {
        if (a(i, j) != 0.0) out << i << ' ' << j << '\n';
      }
    }
    require_data(out.good(), "write failure in " + dir);
  }
}

MultiplexNetwork load_network(const std::string& dir) {
  const auto m = read_manifest((fs::path(dir) / kManifestName).string());
  require_data(m.kind == "binary",
               dir + ": weighted network; load it with the weighted loader");
  MultiplexNetwork net;
  net.n = m.n;
  net.ambient_dims = m.ambient_dims;
  net.layer_names = m.layer_names;
  for (const auto& f : m.layer_files) {
    net.layers.push_back(read_edge_file((fs::path(dir) / f).string(), m.n));
  }
  return net;
}

void save_weighted_network(const SymmetricLayers& layers, const std::string& dir) {
  const Eigen::Index L = layers.num_layers();
  require_data(layers.n >= 2 && L >= 1, "save_weighted_network: empty network");
  require_data(layers.ambient_dims.size() == static_cast<std::size_t>(L),
               "save_weighted_network: ambient_dims count does not match layers");
  for (Eigen::Index l = 0; l < L; ++l) {
    const auto& s = layers.layers[static_cast<std::size_t>(l)];
    require_data(s.rows() == layers.n && s.cols() == layers.n,
                 "save_weighted_network: layer " + std::to_string(l) + " has wrong shape");
    require_data(s.allFinite(), "save_weighted_network: non-finite weights in layer " +
                                    std::to_string(l));
    require_data((s - s.transpose()).cwiseAbs().maxCoeff() == 0.0,
                 "save_weighted_network: layer " + std::to_string(l) +
                     " is not exactly symmetric");
  }
  fs::create_directories(dir);
  NetworkManifest m;
  m.kind = "weighted";
  m.n = layers.n;
  m.ambient_dims = layers.ambient_dims;
  m.layer_names = layers.layer_names;
  for (Eigen::Index l = 0; l < L; ++l) m.layer_files.push_back(layer_file_name(l, L));
  write_manifest(m, (fs::path(dir) / kManifestName).string());

  for (Eigen::Index l = 0; l < L; ++l) {
    auto out = open_out((fs::path(dir) / m.layer_files[static_cast<std::size_t>(l)]).string());
    const auto& s = layers.layers[static_cast<std::size_t>(l)];
    for (Eigen::Index i = 0; i < layers.n; ++i) {
      for (Eigen::Index j = i; j < layers.n; ++j) {
        if (s(i, j) != 0.0) out << i << ' ' << j << ' ' << format_double(s(i, j)) << '\n';
      }
    }
    require_data(out.good(), "write failure in " + dir);
  }
}

SymmetricLayers load_weighted_network(const std::string& dir) {
  const auto m = read_manifest((fs::path(dir) / kManifestName).string());
  SymmetricLayers out;
  out.n = m.n;
  out.ambient_dims = m.ambient_dims;
  out.layer_names = m.layer_names;
  for (const auto& f : m.layer_files) {
    const auto path = (fs::path(dir) / f).string();
    out.layers.push_back(m.kind == "binary" ? read_edge_file(path, m.n)
                                            : read_weighted_layer(path, m.n));
  }
  return out;
}

WeightedEdgeList load_weighted_edges(const std::string& path, Eigen::Index n) {
  require_config(n >= 1, "load_weighted_edges: n must be positive");
  WeightedEdgeList list;
  list.n = n;
  for (const auto& line : textio::read_lines(path)) {
    const std::string where = textio::location(path, line.number);
    require_data(line.tokens.size() == 3, where + "expected 'i j w'");
    WeightedEdge e;
    e.i = textio::parse_int(line.tokens[0], where);
    e.j = textio::parse_int(line.tokens[1], where);
    e.w = textio::parse_real(line.tokens[2], where);
    require_data(e.i >= 0 && e.i < n && e.j >= 0 && e.j < n,
                 where + "node index out of range [0, " + std::to_string(n) + ")");
    require_data(e.w >= 0.0, where + "negative weight");
    list.edges.push_back(e);
  }
  return list;
}

MultiplexNetwork binarize_weighted(const std::vector<WeightedEdgeList>& lists,
                                   const std::vector<double>& thresholds) {
  require_config(!lists.empty(), "binarize: no layers");
  require_config(lists.size() == thresholds.size(), "binarize: one threshold per layer required");
  const Eigen::Index n = lists[0].n;
  require_config(n >= 2, "binarize: need at least two nodes");
  MultiplexNetwork net;
  net.n = n;
  for (std::size_t l = 0; l < lists.size(); ++l) {
    require_config(lists[l].n == n, "binarize: layer " + std::to_string(l) +
                                        " has a different node count");
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
    for (const auto& e : lists[l].edges) {
      require_data(e.w >= 0.0, "binarize: negative weight in layer " + std::to_string(l));
      s(e.i, e.j) += e.w;  // duplicates accumulate
    }
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) {
        if (s(i, j) + s(j, i) >= thresholds[l]) {
          a(i, j) = 1.0;
          a(j, i) = 1.0;
        }
      }
    }
    net.layers.push_back(std::move(a));
    net.ambient_dims.push_back(1);  // callers set real dimensions before fitting
  }
  return net;
}

Eigen::VectorXd total_node_weights(const std::vector<WeightedEdgeList>& lists) {
  require_config(!lists.empty(), "total_node_weights: no layers");
  const Eigen::Index n = lists[0].n;
  Eigen::VectorXd tw = Eigen::VectorXd::Zero(n);
  for (const auto& list : lists) {
    require_config(list.n == n, "total_node_weights: inconsistent node counts");
    for (const auto& e : list.edges) {
      tw[e.i] += e.w;
      tw[e.j] += e.w;
    }
  }
  return tw;
}

std::vector<WeightedEdgeList> filter_by_total_weight(const std::vector<WeightedEdgeList>& lists,
                                                     double min_total,
                                                     std::vector<Eigen::Index>* kept_ids) {
  const Eigen::VectorXd tw = total_node_weights(lists);
  std::vector<Eigen::Index> kept;
  std::vector<Eigen::Index> remap(static_cast<std::size_t>(tw.size()), -1);
  for (Eigen::Index i = 0; i < tw.size(); ++i) {
    if (tw[i] >= min_total) {
      remap[static_cast<std::size_t>(i)] = static_cast<Eigen::Index>(kept.size());
      kept.push_back(i);
    }
  }
  require_data(!kept.empty(), "filter_by_total_weight: every node fell below the threshold");
  std::vector<WeightedEdgeList> out;
  out.reserve(lists.size());
  for (const auto& list : lists) {
    WeightedEdgeList f;
    f.n = static_cast<Eigen::Index>(kept.size());
    for (const auto& e : list.edges) {
      const Eigen::Index i = remap[static_cast<std::size_t>(e.i)];
      const Eigen::Index j = remap[static_cast<std::size_t>(e.j)];
      if (i >= 0 && j >= 0) f.edges.push_back({i, j, e.w});
    }
    out.push_back(std::move(f));
  }
  if (kept_ids) *kept_ids = std::move(kept);
  return out;
}

namespace {

void write_labels_1based(const std::vector<int>& labels, const std::string& path) {
  auto out = open_out(path);
  for (int z : labels) out << (z + 1) << '\n';
  require_data(out.good(), "write failure on " + path);
}

void write_vector(const Eigen::VectorXd& v, const std::string& path) {
  auto out = open_out(path);
  for (Eigen::Index i = 0; i < v.size(); ++i) out << format_double(v[i]) << '\n';
  require_data(out.good(), "write failure on " + path);
}

}  // namespace

void save_matrix(const Eigen::MatrixXd& m, const std::string& path) {
  auto out = open_out(path);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ' ';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
  require_data(out.good(), "write failure on " + path);
}

Eigen::MatrixXd load_matrix(const std::string& path) {
  const auto lines = textio::read_lines(path);
  require_data(!lines.empty(), path + ": empty matrix file");
  const std::size_t cols = lines[0].tokens.size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(lines.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < lines.size(); ++r) {
    const std::string where = textio::location(path, lines[r].number);
    require_data(lines[r].tokens.size() == cols, where + "ragged row");
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          textio::parse_real(lines[r].tokens[c], where);
    }
  }
  return m;
}

std::vector<int> load_labels(const std::string& path) {
  std::vector<int> labels;
  for (const auto& line : textio::read_lines(path)) {
    const std::string where = textio::location(path, line.number);
    require_data(line.tokens.size() == 1, where + "expected one label per line");
    const long long v = textio::parse_int(line.tokens[0], where);
    require_data(v >= 1, where + "labels are 1-based");
    labels.push_back(static_cast<int>(v - 1));
  }
  require_data(!labels.empty(), path + ": no labels");
  return labels;
}

void write_results(const FitResult& fit, const std::optional<ErrorReport>& report,
                   const std::string& dir) {
  require_config(!fit.subspaces.bases.empty(), "write_results: fit has no subspaces");
  fs::create_directories(dir);
  const Eigen::Index n = fit.subspaces.bases[0].rows();
  const Eigen::Index L = fit.layers.num_layers();
  const int M = fit.layers.num_groups;

  {
    auto out = open_out((fs::path(dir) / "summary.csv").string());
    out << "n,L,M,r_bl,r_wl,r_s_max,r_s_ave\n";
    out << n << ',' << L << ',' << M << ',';
    if (report) out << format_double(report->r_bl);
    out << ',';
    if (report && report->r_wl) out << format_double(*report->r_wl);
    out << ',';
    if (report && report->r_s_max) out << format_double(*report->r_s_max);
    out << ',';
    if (report && report->r_s_ave) out << format_double(*report->r_s_ave);
    out << '\n';
    require_data(out.good(), "write failure in " + dir);
  }

  write_labels_1based(fit.layers.labels, (fs::path(dir) / "layer_labels.txt").string());
  write_vector(fit.gram_spectrum.values, (fs::path(dir) / "gram_spectrum.txt").string());

  for (int m = 0; m < M; ++m) {
    const fs::path gdir = fs::path(dir) / group_dir_name(m, M);
    fs::create_directories(gdir);
    save_matrix(fit.subspaces.bases[static_cast<std::size_t>(m)], (gdir / "basis.txt").string());
    write_vector(fit.subspaces.leading_values[static_cast<std::size_t>(m)],
                 (gdir / "h_spectrum.txt").string());
    if (fit.nodes) {
      write_labels_1based(fit.nodes->labels[static_cast<std::size_t>(m)],
                          (gdir / "node_labels.txt").string());
    }
  }
}

void save_truth(const GroundTruth& truth, const std::string& dir) {
  fs::create_directories(dir);
  const Eigen::Index M = truth.num_groups;
  {
    auto out = open_out((fs::path(dir) / "truth_info.txt").string());
    out << "format dimple-truth 1\n";
    out << "kind " << (truth.kind == ModelKind::block ? "block" : "gdpg") << "\n";
    out << "n " << truth.n << "\n";
    out << "L " << truth.num_layers() << "\n";
    out << "M " << M << "\n";
    out << "group_dims";
    for (Eigen::Index k : truth.group_dims) out << ' ' << k;
    out << "\n";
    require_data(out.good(), "write failure in " + dir);
  }
  write_labels_1based(truth.layer_labels, (fs::path(dir) / "truth_layer_labels.txt").string());
  for (Eigen::Index m = 0; m < M; ++m) {
    const std::string tag = group_dir_name(m, M);
    save_matrix(truth.bases[static_cast<std::size_t>(m)],
                (fs::path(dir) / ("truth_" + tag + "_basis.txt")).string());
    if (truth.kind == ModelKind::block) {
      write_labels_1based(truth.node_labels[static_cast<std::size_t>(m)],
                          (fs::path(dir) / ("truth_" + tag + "_node_labels.txt")).string());
    } else {
      save_matrix(truth.latent[static_cast<std::size_t>(m)],
                  (fs::path(dir) / ("truth_" + tag + "_latent.txt")).string());
    }
  }
}

GroundTruth load_truth(const std::string& dir) {
  const std::string info_path = (fs::path(dir) / "truth_info.txt").string();
  GroundTruth truth;
  Eigen::Index declared_l = -1;
  bool saw_format = false;
  for (const auto& line : textio::read_lines(info_path)) {
    const std::string where = textio::location(info_path, line.number);
    const std::string& key = line.tokens[0];
    if (key == "format") {
      require_data(line.tokens.size() == 3 && line.tokens[1] == "dimple-truth" &&
                       line.tokens[2] == "1",
                   where + "unsupported format line");
      saw_format = true;
    } else if (key == "kind") {
      require_data(line.tokens.size() == 2, where + "kind takes one value");
      require_data(line.tokens[1] == "block" || line.tokens[1] == "gdpg",
                   where + "kind must be block or gdpg");
      truth.kind = line.tokens[1] == "block" ? ModelKind::block : ModelKind::gdpg;
    } else if (key == "n") {
      truth.n = textio::parse_int(line.tokens[1], where);
    } else if (key == "L") {
      declared_l = textio::parse_int(line.tokens[1], where);
    } else if (key == "M") {
      truth.num_groups = textio::parse_int(line.tokens[1], where);
    } else if (key == "group_dims") {
      for (std::size_t t = 1; t < line.tokens.size(); ++t) {
        truth.group_dims.push_back(textio::parse_int(line.tokens[t], where));
      }
    } else {
      throw data_error(where + "unknown truth key '" + key + "'");
    }
  }
  require_data(saw_format, info_path + ": missing format line");
  require_data(truth.n >= 2 && truth.num_groups >= 1, info_path + ": incomplete header");
  require_data(static_cast<Eigen::Index>(truth.group_dims.size()) == truth.num_groups,
               info_path + ": group_dims count does not match M");

  truth.layer_labels = load_labels((fs::path(dir) / "truth_layer_labels.txt").string());
  require_data(declared_l < 0 || declared_l == truth.num_layers(),
               info_path + ": L does not match the layer label file");
  for (int z : truth.layer_labels) {
    require_data(z >= 0 && z < truth.num_groups, dir + ": layer label out of range");
  }
  for (Eigen::Index m = 0; m < truth.num_groups; ++m) {
    const std::string tag = group_dir_name(m, truth.num_groups);
    truth.bases.push_back(load_matrix((fs::path(dir) / ("truth_" + tag + "_basis.txt")).string()));
    require_data(truth.bases.back().rows() == truth.n &&
                     truth.bases.back().cols() == truth.group_dims[static_cast<std::size_t>(m)],
                 dir + ": basis of group " + std::to_string(m) + " has wrong shape");
    if (truth.kind == ModelKind::block) {
      auto z = load_labels((fs::path(dir) / ("truth_" + tag + "_node_labels.txt")).string());
      require_data(static_cast<Eigen::Index>(z.size()) == truth.n,
                   dir + ": node labels of group " + std::to_string(m) + " have wrong length");
      for (int zi : z) {
        require_data(zi >= 0 && zi < truth.group_dims[static_cast<std::size_t>(m)],
                     dir + ": node label out of range in group " + std::to_string(m));
      }
      truth.node_labels.push_back(std::move(z));
    } else {
      truth.latent.push_back(
          load_matrix((fs::path(dir) / ("truth_" + tag + "_latent.txt")).string()));
      require_data(truth.latent.back().rows() == truth.n &&
                       truth.latent.back().cols() == truth.group_dims[static_cast<std::size_t>(m)],
                   dir + ": latent positions of group " + std::to_string(m) + " have wrong shape");
    }
  }
  return truth;
}

}  // namespace dimple
