#include "gnnmerge/graph.hpp"

#include <algorithm>
#include <cmath>

#include "binary_io.hpp"
#include "gnnmerge/errors.hpp"

namespace gnnmerge {

void validate_graph(const Graph& g) {
    if (g.csr_offsets.size() != g.num_nodes + 1) {
        throw FormatError("graph: csr_offsets length " + std::to_string(g.csr_offsets.size()) +
                          " != num_nodes + 1");
    }
    if (!g.csr_offsets.empty() && g.csr_offsets.front() != 0) {
        throw FormatError("graph: csr_offsets[0] must be 0");
    }
    for (std::size_t v = 0; v < g.num_nodes; ++v) {
        if (g.csr_offsets[v + 1] < g.csr_offsets[v]) {
            throw FormatError("graph: csr_offsets decrease at node " + std::to_string(v));
        }
    }
    if (g.csr_offsets.back() != g.csr_targets.size()) {
        throw FormatError("graph: last offset " + std::to_string(g.csr_offsets.back()) +
                          " != edge entry count " + std::to_string(g.csr_targets.size()));
    }
    for (std::size_t v = 0; v < g.num_nodes; ++v) {
        auto nbrs = g.neighbors(v);
        for (std::size_t i = 0; i < nbrs.size(); ++i) {
            if (nbrs[i] >= g.num_nodes) {
                throw FormatError("graph: node " + std::to_string(v) + " has target " +
                                  std::to_string(nbrs[i]) + " >= num_nodes");
            }
            if (i > 0 && nbrs[i] <= nbrs[i - 1]) {
                throw FormatError("graph: neighbor list of node " + std::to_string(v) +
                                  " not strictly ascending");
            }
        }
    }
    if (g.features.rows() != g.num_nodes) {
        throw FormatError("graph: feature rows " + std::to_string(g.features.rows()) +
                          " != num_nodes " + std::to_string(g.num_nodes));
    }
    if (!all_finite(g.features)) {
        throw FormatError("graph: non-finite feature values");
    }
    if (g.has_labels() && g.labels.size() != g.num_nodes) {
        throw FormatError("graph: label count " + std::to_string(g.labels.size()) +
                          " != num_nodes");
    }
}

std::vector<std::uint64_t> degrees_with_self_loop(const Graph& g) {
    std::vector<std::uint64_t> d(g.num_nodes);
    for (std::size_t v = 0; v < g.num_nodes; ++v)
        d[v] = g.csr_offsets[v + 1] - g.csr_offsets[v] + 1;
    return d;
}

Graph build_undirected(std::size_t num_nodes,
                       const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges,
                       DenseMatrix features, std::vector<std::int32_t> labels) {
    std::vector<std::vector<std::uint32_t>> adj(num_nodes);
    for (const auto& [u, v] : edges) {
        if (u >= num_nodes || v >= num_nodes) {
            throw ParameterError("build_undirected: edge endpoint out of range");
        }
        if (u == v) throw ParameterError("build_undirected: self-loops are not stored");
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    Graph g;
    g.num_nodes = num_nodes;
    g.csr_offsets.assign(num_nodes + 1, 0);
    for (std::size_t v = 0; v < num_nodes; ++v) {
        std::sort(adj[v].begin(), adj[v].end());
        adj[v].erase(std::unique(adj[v].begin(), adj[v].end()), adj[v].end());
        g.csr_offsets[v + 1] = g.csr_offsets[v] + adj[v].size();
    }
    g.csr_targets.reserve(g.csr_offsets.back());
    for (auto& list : adj)
        g.csr_targets.insert(g.csr_targets.end(), list.begin(), list.end());
    g.features = std::move(features);
    g.labels = std::move(labels);
    validate_graph(g);
    return g;
}

Graph strip_labels(const Graph& g) {
    Graph out = g;
    out.labels.clear();
    return out;
}

bool is_undirected(const Graph& g) {
    for (std::size_t v = 0; v < g.num_nodes; ++v) {
        for (std::uint32_t u : g.neighbors(v)) {
            auto nbrs = g.neighbors(u);
            if (!std::binary_search(nbrs.begin(), nbrs.end(), static_cast<std::uint32_t>(v)))
                return false;
        }
    }
    return true;
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> undirected_edges(const Graph& g) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
    for (std::size_t v = 0; v < g.num_nodes; ++v)
        for (std::uint32_t u : g.neighbors(v))
            if (v < u) out.emplace_back(static_cast<std::uint32_t>(v), u);
    return out;
}

namespace {
constexpr char kGraphMagic[4] = {'G', 'N', 'M', 'G'};
constexpr std::uint32_t kGraphVersion = 1;
} // namespace

void save_graph(const Graph& g, const std::string& path) {
    validate_graph(g);
    io::Writer w(path);
    w.bytes(kGraphMagic, 4);
    w.u32(kGraphVersion);
    w.u64(g.num_nodes);
    w.u64(g.csr_targets.size());
    w.u32(static_cast<std::uint32_t>(g.features.cols()));
    w.u8(g.has_labels() ? 1 : 0);
    for (std::uint64_t o : g.csr_offsets) w.u64(o);
    for (std::uint32_t t : g.csr_targets) w.u32(t);
    for (double v : g.features.values()) w.f32(static_cast<float>(v));
    if (g.has_labels())
        for (std::int32_t l : g.labels) w.i32(l);
    w.finish("graph");
}

Graph load_graph(const std::string& path) {
    io::Reader r(path);
    char magic[4];
    r.bytes(magic, 4, "magic");
    if (std::memcmp(magic, kGraphMagic, 4) != 0) r.fail("bad magic, expected GNMG");
    const std::uint32_t version = r.u32("version");
    if (version != kGraphVersion) {
        r.fail("unsupported graph format version " + std::to_string(version));
    }
    Graph g;
    g.num_nodes = r.u64("num_nodes");
    const std::uint64_t num_edges = r.u64("num_edge_entries");
    const std::uint32_t dim = r.u32("feature_dim");
    const bool has_labels = r.u8("has_labels") != 0;

    g.csr_offsets.resize(g.num_nodes + 1);
    for (auto& o : g.csr_offsets) o = r.u64("csr_offsets");
    g.csr_targets.resize(num_edges);
    for (auto& t : g.csr_targets) t = r.u32("csr_targets");
    g.features = DenseMatrix(g.num_nodes, dim);
    for (double& v : g.features.values()) v = static_cast<double>(r.f32("features"));
    if (has_labels) {
        g.labels.resize(g.num_nodes);
        for (auto& l : g.labels) l = r.i32("labels");
    }
    if (!r.at_eof()) r.fail("trailing bytes after payload");
    try {
        validate_graph(g);
    } catch (const FormatError& e) {
        r.fail(std::string("invariant violation: ") + e.what());
    }
    return g;
}

} // namespace gnnmerge
