#include "gnnmerge/reduction.hpp"

#include <algorithm>

#include "gnnmerge/errors.hpp"
#include "gnnmerge/rng.hpp"

namespace gnnmerge {

TargetSet sample_targets(const Graph& graph, double ratio, std::uint64_t seed) {
    if (!(ratio > 0.0 && ratio <= 1.0)) {
        throw ParameterError("sample_targets: ratio must be in (0, 1], got " +
                             std::to_string(ratio));
    }
    const std::size_t n = graph.num_nodes;
    std::size_t count = static_cast<std::size_t>(ratio * static_cast<double>(n));
    if (count == 0) count = 1;
    if (count > n) count = n;

    std::vector<std::uint32_t> ids(n);
    for (std::size_t i = 0; i < n; ++i) ids[i] = static_cast<std::uint32_t>(i);
    Rng rng(seed);
    // Partial Fisher-Yates: the first `count` slots are a uniform sample.
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.integer(n - i));
        std::swap(ids[i], ids[j]);
    }
    ids.resize(count);
    std::sort(ids.begin(), ids.end());

    TargetSet t;
    t.indices = std::move(ids);
    t.ratio = ratio;
    t.seed = seed;
    return t;
}

CondensedView condense_one_hop(const Graph& graph, const TargetSet& targets) {
    std::vector<bool> keep(graph.num_nodes, false);
    for (std::uint32_t t : targets.indices) {
        if (t >= graph.num_nodes) {
            throw ParameterError("condense_one_hop: target " + std::to_string(t) +
                                 " out of range");
        }
        keep[t] = true;
        for (std::uint32_t u : graph.neighbors(t)) keep[u] = true;
    }

    CondensedView view;
    std::vector<std::uint32_t> local_of(graph.num_nodes, UINT32_MAX);
    for (std::size_t v = 0; v < graph.num_nodes; ++v) {
        if (keep[v]) {
            local_of[v] = static_cast<std::uint32_t>(view.nodes.size());
            view.nodes.push_back(static_cast<std::uint32_t>(v));
        }
    }

    std::vector<bool> is_target(graph.num_nodes, false);
    for (std::uint32_t t : targets.indices) is_target[t] = true;

    view.offsets.assign(view.nodes.size() + 1, 0);
    for (std::size_t i = 0; i < view.nodes.size(); ++i) {
        const std::uint32_t v = view.nodes[i];
        view.offsets[i + 1] = view.offsets[i];
        if (!is_target[v]) continue; // only arcs into targets are retained
        for (std::uint32_t u : graph.neighbors(v)) {
            view.arcs.push_back(local_of[u]);
            ++view.offsets[i + 1];
        }
    }
    for (std::uint32_t t : targets.indices) view.target_local.push_back(local_of[t]);

    view.degree_self.resize(view.nodes.size());
    for (std::size_t i = 0; i < view.nodes.size(); ++i) {
        view.degree_self[i] = graph.degree(view.nodes[i]) + 1;
    }
    view.original_edge_entries = graph.num_edge_entries();
    return view;
}

DenseMatrix gather_rows(const DenseMatrix& full, const std::vector<std::uint32_t>& ids) {
    DenseMatrix out(ids.size(), full.cols());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const double* src = full.row(ids[i]);
        double* dst = out.row(i);
        for (std::size_t j = 0; j < full.cols(); ++j) dst[j] = src[j];
    }
    return out;
}

} // namespace gnnmerge
