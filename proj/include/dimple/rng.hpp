#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

#include "dimple/common.hpp"

// Seedable, portable randomness.  The engine is std::mt19937_64, whose output
// sequence is pinned by the C++ standard, and every distribution transform is
// implemented here explicitly, so identical seeds give identical draws on any
// platform or thread count.  Independent substreams are derived by hashing a
// master seed together with integer stream tags (e.g. one substream per layer,
// per group, per replicate); see derive_seed.

namespace dimple {

// splitmix64 mixer (Steele, Lea, Flood): bijective, well-distributed.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// fold one tag into a seed; chaining mixes keep distinct tag tuples distinct
inline std::uint64_t seed_combine(std::uint64_t seed, std::uint64_t tag) {
  return splitmix64(seed ^ (splitmix64(tag) + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2)));
}

// substream seed for a tagged index tuple, e.g. derive_seed(s, {kLayerStream, l})
inline std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
  std::uint64_t h = splitmix64(seed);
  for (std::uint64_t t : tags) h = seed_combine(h, t);
  return h;
}

// stream purpose tags (documented so that output files are reproducible from
// the seed alone)
enum : std::uint64_t {
  kLayerLabelStream = 1,   // group memberships of layers
  kNodeLabelStream = 2,    // community memberships, one substream per group
  kConnectivityStream = 3, // connection matrices, one substream per layer
  kLatentStream = 4,       // latent positions, one substream per group
  kAdjacencyStream = 5,    // edge sampling, one substream per layer
  kKmeansStream = 6,       // k-means restarts
  kGridStream = 7,         // simulation grid replicates
  kFitStream = 8,          // fitting pipeline
};

class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // uniform on [0,1) with 53 random bits
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) {
    require_config(lo <= hi, "uniform bounds must satisfy lo <= hi");
    return lo + (hi - lo) * uniform01();
  }

  bool bernoulli(double p) {
    require_config(p >= 0.0 && p <= 1.0, "bernoulli probability must lie in [0,1]");
    return uniform01() < p;
  }

  // integer in [0, n)
  std::uint64_t below(std::uint64_t n) {
    require_config(n > 0, "below requires a positive bound");
    // multiply-shift rejection-free bound is fine at our scales; use simple
    // rejection to stay exactly uniform
    std::uint64_t bound = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x = engine_();
    while (x >= bound) x = engine_();
    return x % n;
  }

  double normal() {
    // Box-Muller, cached second variate
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // Marsaglia-Tsang; for shape < 1 uses the boost gamma(shape+1) * U^(1/shape)
  double gamma(double shape) {
    require_config(shape > 0.0, "gamma shape must be positive");
    if (shape < 1.0) {
      double u = uniform01();
      while (u <= 0.0) u = uniform01();
      return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    double d = shape - 1.0 / 3.0;
    double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x = normal();
      double t = 1.0 + c * x;
      if (t <= 0.0) continue;
      double v = t * t * t;
      double u = uniform01();
      double x2 = x * x;
      if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
      if (u > 0.0 && std::log(u) < 0.5 * x2 + d - d * v + d * std::log(v)) return d * v;
    }
  }

  // symmetric Dirichlet via normalized gammas
  std::vector<double> dirichlet(double alpha, int k) {
    require_config(k > 0, "dirichlet dimension must be positive");
    require_config(alpha > 0.0, "dirichlet concentration must be positive");
    std::vector<double> g(static_cast<std::size_t>(k));
    for (;;) {
      double sum = 0.0;
      for (auto& gi : g) {
        gi = gamma(alpha);
        sum += gi;
      }
      if (sum > 0.0) {
        for (auto& gi : g) gi /= sum;
        return g;
      }
    }
  }

private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace dimple
