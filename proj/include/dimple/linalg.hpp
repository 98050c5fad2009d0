#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "dimple/common.hpp"

// Spectral primitives over dense symmetric matrices.  Free functions accept
// any Eigen dense expression; scalar type is deduced.  All routines are pure
// and deterministic, so callers may evaluate them concurrently.

namespace dimple {

template <typename Scalar>
struct Spectrum {
  // eigenvalues ordered by decreasing magnitude, signed values kept
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> values;
  // orthonormal eigenvectors, column j pairs with values[j]
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> vectors;
};

using SpectrumXd = Spectrum<double>;

template <typename Scalar>
struct SinThetaDistance {
  Scalar spectral;   // sin of the largest principal angle
  Scalar frobenius;  // sqrt of the summed squared sines over all angles
};

namespace detail {

template <typename Derived>
void check_square_symmetric(const Eigen::MatrixBase<Derived>& s, const char* who) {
  using Scalar = typename Derived::Scalar;
  require_data(s.rows() == s.cols(), std::string(who) + ": matrix must be square");
  require_data(s.rows() > 0, std::string(who) + ": matrix must be non-empty");
  require_data(s.allFinite(), std::string(who) + ": matrix has non-finite entries");
  const Scalar scale = std::max(Scalar(1), s.cwiseAbs().maxCoeff());
  const Scalar asym = (s - s.transpose()).cwiseAbs().maxCoeff();
  require_data(asym <= Scalar(1e-8) * scale, std::string(who) + ": matrix is not symmetric");
}

// indices of the k leading eigenpairs by |value|; boundary ties keep the
// larger signed eigenvalue, then the lower original index
template <typename Vec>
std::vector<Eigen::Index> topk_order(const Vec& vals, Eigen::Index k) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(vals.size()));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
    const auto aa = std::abs(vals[a]);
    const auto ab = std::abs(vals[b]);
    if (aa != ab) return aa > ab;
    if (vals[a] != vals[b]) return vals[a] > vals[b];
    return a < b;
  });
  idx.resize(static_cast<std::size_t>(k));
  return idx;
}

}  // namespace detail

// k leading eigenpairs (by eigenvalue magnitude) of a dense symmetric matrix.
// Full symmetric eigendecomposition underneath: exact at desk scale and free
// of iteration-order nondeterminism.
template <typename Derived>
Spectrum<typename Derived::Scalar> sym_eigs_topk(const Eigen::MatrixBase<Derived>& s,
                                                 Eigen::Index k) {
  using Scalar = typename Derived::Scalar;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  detail::check_square_symmetric(s, "sym_eigs_topk");
  require_config(k >= 1 && k <= s.rows(), "sym_eigs_topk: k must be in [1, n]");

  Mat sd = s;
  Eigen::SelfAdjointEigenSolver<Mat> es(sd);
  require_numeric(es.info() == Eigen::Success, "sym_eigs_topk: eigendecomposition failed");

  const auto order = detail::topk_order(es.eigenvalues(), k);
  Spectrum<Scalar> out;
  out.values.resize(k);
  out.vectors.resize(s.rows(), k);
  for (Eigen::Index j = 0; j < k; ++j) {
    out.values[j] = es.eigenvalues()[order[static_cast<std::size_t>(j)]];
    out.vectors.col(j) = es.eigenvectors().col(order[static_cast<std::size_t>(j)]);
  }
  return out;
}

// best rank-k symmetric approximation: sum of the k leading eigenpairs
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> rank_k_projection(
    const Eigen::MatrixBase<Derived>& s, Eigen::Index k) {
  auto spec = sym_eigs_topk(s, k);
  return spec.vectors * spec.values.asDiagonal() * spec.vectors.transpose();
}

// principal-angle distances between the column spans of two orthonormal bases
template <typename DerivedU, typename DerivedV>
SinThetaDistance<typename DerivedU::Scalar> sin_theta(const Eigen::MatrixBase<DerivedU>& u,
                                                      const Eigen::MatrixBase<DerivedV>& v) {
  using Scalar = typename DerivedU::Scalar;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  require_data(u.rows() == v.rows(), "sin_theta: bases live in different spaces");
  require_data(u.cols() == v.cols(), "sin_theta: bases have different dimensions");
  require_data(u.cols() >= 1, "sin_theta: bases must have at least one column");
  require_data(u.rows() >= u.cols(), "sin_theta: basis has more columns than rows");
  require_data(u.allFinite() && v.allFinite(), "sin_theta: non-finite entries");

  Mat m = u.transpose() * v;
  Eigen::JacobiSVD<Mat> svd(m);
  const Scalar smin = svd.singularValues().minCoeff();
  const Scalar fro2 = m.squaredNorm();
  SinThetaDistance<Scalar> d;
  d.spectral = std::sqrt(std::max(Scalar(0), Scalar(1) - smin * smin));
  d.frobenius = std::sqrt(std::max(Scalar(0), Scalar(u.cols()) - fro2));
  return d;
}

// rank selection by the largest consecutive gap ratio over a non-increasing
// singular-value profile; returns the chosen rank k in [1, k_max]
template <typename Derived>
Eigen::Index eigengap_select(const Eigen::MatrixBase<Derived>& sigma, Eigen::Index k_max) {
  using Scalar = typename Derived::Scalar;
  require_config(sigma.size() >= 2, "eigengap_select: need at least two values");
  require_config(k_max >= 1 && k_max < sigma.size(), "eigengap_select: k_max must be in [1, len-1]");
  require_data(sigma.allFinite(), "eigengap_select: non-finite values");
  require_data(sigma[0] > Scalar(0), "eigengap_select: leading value must be positive");
  for (Eigen::Index i = 0; i + 1 < sigma.size(); ++i) {
    require_data(sigma[i] >= sigma[i + 1], "eigengap_select: values must be non-increasing");
  }
  require_data(sigma[sigma.size() - 1] >= Scalar(0), "eigengap_select: values must be non-negative");

  const Scalar floor = Scalar(1e-12) * sigma[0];
  Eigen::Index best_k = 1;
  Scalar best_ratio = sigma[0] / std::max(sigma[1], floor);
  for (Eigen::Index k = 2; k <= k_max; ++k) {
    const Scalar ratio = sigma[k - 1] / std::max(sigma[k], floor);
    if (ratio > best_ratio) {
      best_ratio = ratio;
      best_k = k;
    }
  }
  return best_k;
}

// gap ratio achieved at the selected rank (diagnostic companion to
// eigengap_select; small winning ratios mean a flat, uninformative profile)
template <typename Derived>
typename Derived::Scalar eigengap_ratio(const Eigen::MatrixBase<Derived>& sigma,
                                        Eigen::Index k) {
  using Scalar = typename Derived::Scalar;
  const Scalar floor = Scalar(1e-12) * sigma[0];
  return sigma[k - 1] / std::max(sigma[k], floor);
}

// pairwise subspace-alignment Gram matrix: entry (l, l') is the squared
// Frobenius norm of U_l^T U_l', i.e. the inner product of the corresponding
// projection matrices.  Symmetric positive semidefinite; diagonal entries
// equal each basis's column count.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> gram_from_bases(
    const std::vector<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>>& bases) {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const auto L = static_cast<Eigen::Index>(bases.size());
  require_config(L >= 1, "gram_from_bases: need at least one basis");
  const Eigen::Index n = bases[0].rows();
  for (const auto& b : bases) {
    require_data(b.rows() == n, "gram_from_bases: bases live in different spaces");
    require_data(b.cols() >= 1 && b.cols() <= n, "gram_from_bases: bad basis width");
    require_data(b.allFinite(), "gram_from_bases: non-finite entries");
  }
  Mat g(L, L);
  for (Eigen::Index a = 0; a < L; ++a) {
    for (Eigen::Index b = a; b < L; ++b) {
      const Scalar v = (bases[static_cast<std::size_t>(a)].transpose() *
                        bases[static_cast<std::size_t>(b)])
                           .squaredNorm();
      g(a, b) = v;
      g(b, a) = v;
    }
  }
  return g;
}

}  // namespace dimple
