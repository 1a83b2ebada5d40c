#pragma once

#include <cstdint>

#include "gnnmerge/graph.hpp"

namespace gnnmerge {

/// Stochastic-block-model graph generator. Nodes are grouped into
/// num_blocks blocks of nodes_per_block; each within-block pair is an edge
/// with probability p_in and each cross-block pair with probability p_out.
/// Labels are block ids. Features are orthogonal per-block mean vectors
/// (the standard basis vector of the block) plus i.i.d. Gaussian noise with
/// standard deviation noise_sigma, so a shallow model can separate blocks at
/// desk scale. Deterministic for a fixed seed.
Graph generate_sbm(std::size_t num_blocks, std::size_t nodes_per_block, double p_in,
                   double p_out, std::size_t feature_dim, double noise_sigma,
                   std::uint64_t seed);

} // namespace gnnmerge
