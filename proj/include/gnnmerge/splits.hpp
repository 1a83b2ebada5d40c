#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gnnmerge/graph.hpp"

namespace gnnmerge {

/// Disjoint train/val/test node index sets.
struct NodeSplit {
    std::vector<std::uint32_t> train;
    std::vector<std::uint32_t> val;
    std::vector<std::uint32_t> test;
    std::size_t num_classes = 0; // classes of the task this split belongs to
};

using EdgePair = std::pair<std::uint32_t, std::uint32_t>;

/// Per-partition positive and negative edge lists; every partition holds one
/// sampled non-edge per positive, and negatives are disjoint across
/// partitions.
struct EdgeSplit {
    struct Part {
        std::vector<EdgePair> pos;
        std::vector<EdgePair> neg;
    };
    Part train, val, test;
};

struct TaskView {
    Graph graph;     // shares the original structure; labels remapped per task
    NodeSplit split; // 60/20/20 over the task's labeled nodes
};

struct DisjointLabelSplit {
    TaskView task_a;
    TaskView task_b;
};

/// Splits a C-class graph into two node-classification tasks: task A keeps
/// the first ceil(C/2) classes (remapped to 0-based), task B the rest. Both
/// tasks share the full graph structure; nodes outside a task are unlabeled
/// (-1). Per-task 60/20/20 train/val/test via seeded shuffle.
DisjointLabelSplit disjoint_label_split(const Graph& g, std::uint64_t seed);

/// 70/10/20 partition of the undirected positive edges by seeded shuffle,
/// plus uniformly sampled non-edge negatives, one per positive, disjoint
/// across partitions. Requires an undirected graph with at least 10 edges.
EdgeSplit link_split(const Graph& g, std::uint64_t seed);

void validate_node_split(const NodeSplit& s, std::size_t num_nodes);
void validate_edge_split(const EdgeSplit& s, const Graph& g);

// JSON persistence (artifact plumbing for the CLI pipeline).
void save_node_split(const NodeSplit& s, const std::string& path);
NodeSplit load_node_split(const std::string& path);
void save_edge_split(const EdgeSplit& s, const std::string& path);
EdgeSplit load_edge_split(const std::string& path);

/// Peeks at the "kind" field of a split file: "node" or "link".
std::string split_file_kind(const std::string& path);

} // namespace gnnmerge
