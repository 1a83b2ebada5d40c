#pragma once

#include <cstdint>
#include <vector>

#include "gnnmerge/graph.hpp"

namespace gnnmerge {

/// Sorted node subset used to restrict alignment statistics.
struct TargetSet {
    std::vector<std::uint32_t> indices; // sorted, unique
    double ratio = 1.0;
    std::uint64_t seed = 0;
};

/// Uniform sample without replacement of max(1, floor(ratio * num_nodes))
/// nodes; deterministic per seed, returned sorted.
TargetSet sample_targets(const Graph& graph, double ratio, std::uint64_t seed);

/// 1-hop condensation of a graph around a target set: the view keeps the
/// nodes targets ∪ N(targets) and only the arcs whose head is a target. With
/// per-layer base-model inputs precomputed on the full graph, aggregation
/// over this edge set reproduces the target rows of every transform exactly.
struct CondensedView {
    std::vector<std::uint32_t> nodes;          // original ids, sorted
    std::vector<std::uint64_t> offsets;        // CSR over local ids, |nodes|+1
    std::vector<std::uint32_t> arcs;           // local neighbor ids (target rows only)
    std::vector<std::uint32_t> target_local;   // local index of each target, sorted by id
    std::vector<std::uint64_t> degree_self;    // original degree + 1, per local node
    std::size_t original_edge_entries = 0;

    std::size_t num_local() const { return nodes.size(); }
    std::size_t edge_entries() const { return arcs.size(); }
};

CondensedView condense_one_hop(const Graph& graph, const TargetSet& targets);

/// Gathers the rows of a full-graph matrix for the view's local node order.
DenseMatrix gather_rows(const DenseMatrix& full, const std::vector<std::uint32_t>& ids);

} // namespace gnnmerge
