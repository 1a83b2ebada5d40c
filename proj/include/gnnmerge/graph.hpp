#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gnnmerge/linalg.hpp"

namespace gnnmerge {

/// CSR graph with node features and optional integer labels. Directed edge
/// entries; undirected graphs store both arcs. Neighbor lists are sorted
/// ascending with no duplicates. Self-loops are never stored: architectures
/// that need them add them arithmetically.
struct Graph {
    std::size_t num_nodes = 0;
    std::vector<std::uint64_t> csr_offsets; // num_nodes + 1
    std::vector<std::uint32_t> csr_targets;
    DenseMatrix features;                 // num_nodes x d
    std::vector<std::int32_t> labels;     // empty when absent; -1 = unlabeled

    bool has_labels() const { return !labels.empty(); }
    std::size_t num_edge_entries() const { return csr_targets.size(); }
    std::size_t feature_dim() const { return features.cols(); }

    std::span<const std::uint32_t> neighbors(std::size_t v) const {
        return {csr_targets.data() + csr_offsets[v],
                csr_targets.data() + csr_offsets[v + 1]};
    }
    std::size_t degree(std::size_t v) const {
        return static_cast<std::size_t>(csr_offsets[v + 1] - csr_offsets[v]);
    }
};

/// Checks every Graph invariant; throws FormatError describing the first
/// violation.
void validate_graph(const Graph& g);

/// d_v = out-neighbor count + 1 for every node.
std::vector<std::uint64_t> degrees_with_self_loop(const Graph& g);

/// Builds a graph from undirected edge pairs: both arcs are stored, neighbor
/// lists sorted, duplicates and self-loops rejected.
Graph build_undirected(std::size_t num_nodes,
                       const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges,
                       DenseMatrix features, std::vector<std::int32_t> labels = {});

/// Copy without labels; merge entry points operate on these views so the
/// merge path cannot read supervision labels.
Graph strip_labels(const Graph& g);

/// True when for every stored arc (u,v) the reverse arc (v,u) is present.
bool is_undirected(const Graph& g);

/// Collects the undirected edge set as pairs (u, v) with u < v.
std::vector<std::pair<std::uint32_t, std::uint32_t>> undirected_edges(const Graph& g);

// Binary graph format (little-endian): magic "GNMG", version u32 = 1,
// num_nodes u64, num_edge_entries u64, feature_dim u32, has_labels u8, then
// csr_offsets u64[], csr_targets u32[], features f32[] row-major, labels
// i32[] when present. Readers reject unknown versions.
void save_graph(const Graph& g, const std::string& path);
Graph load_graph(const std::string& path);

} // namespace gnnmerge
