#pragma once

#include <cstdint>

#include "dimple/network.hpp"

// Synthetic-data generators.  Group labels are uniform over the M groups and
// community labels uniform over the K_m communities (resampled until every
// class is non-empty); connection matrices have Uniform[edge_lo, edge_hi]
// entries, off-diagonal entries scaled by offdiag_scale; gdpg latent positions
// have symmetric-Dirichlet rows.  Every random quantity draws from its own
// substream of cfg.seed (per layer / per group), so outputs are reproducible
// bit-for-bit from the seed alone regardless of evaluation order.

namespace dimple {

// block-model truth: P^(l) = Z^(m) B^(l) Z^(m)^T with m the group of layer l;
// bases are the column-normalized membership matrices
GroundTruth generate_block_truth(const DimpleConfig& cfg);

// generalized-dot-product truth: P^(l) = X^(m) B^(l) X^(m)^T with Dirichlet
// latent rows; bases are the left singular factors of X^(m)
GroundTruth generate_gdpg_truth(const DimpleConfig& cfg);

// independent Bernoulli draws of the upper triangle of every layer (zero
// diagonal, mirrored); layer l draws from a substream of (seed, l);
// ambient_dims are the planted group dimensions K_{m(l)}
MultiplexNetwork sample_adjacency(const GroundTruth& truth, std::uint64_t seed);

}  // namespace dimple
