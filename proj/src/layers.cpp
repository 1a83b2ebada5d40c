#include "gnnmerge/layers.hpp"

#include <cmath>
#include <limits>

#include "gnnmerge/errors.hpp"

namespace gnnmerge {

double relu(double x) { return x > 0.0 ? x : 0.0; }
double leaky_relu(double x) { return x > 0.0 ? x : kLeakyReluSlope * x; }

DenseMatrix apply_activation(const DenseMatrix& m, Activation act) {
    if (act == Activation::Identity) return m;
    DenseMatrix out = m;
    for (double& v : out.values()) v = relu(v);
    return out;
}

namespace {

void check_input(const DenseMatrix& h_prev, const Graph& graph, const LayerSpec& spec,
                 const char* what) {
    if (h_prev.rows() != graph.num_nodes) {
        throw ShapeError(std::string(what) + ": embedding rows " +
                         std::to_string(h_prev.rows()) + " != num_nodes " +
                         std::to_string(graph.num_nodes));
    }
    if (h_prev.cols() != spec.in_dim) {
        throw ShapeError(std::string(what) + ": embedding dim " + std::to_string(h_prev.cols()) +
                         " != layer in_dim " + std::to_string(spec.in_dim));
    }
}

} // namespace

LayerResult gcn_layer(const DenseMatrix& h_prev, const Graph& graph, const LayerSpec& spec) {
    check_input(h_prev, graph, spec, "gcn_layer");
    const std::size_t n = graph.num_nodes;
    const std::size_t d = spec.in_dim;
    const std::vector<std::uint64_t> deg = degrees_with_self_loop(graph);

    // z_v = sum_{u in N_v ∪ {v}} h_u / sqrt(d_u d_v), self-loop added
    // arithmetically (never stored in CSR).
    DenseMatrix z(n, d);
    for (std::size_t v = 0; v < n; ++v) {
        const double dv = std::sqrt(static_cast<double>(deg[v]));
        double* zrow = z.row(v);
        for (std::uint32_t u : graph.neighbors(v)) {
            const double c = 1.0 / (std::sqrt(static_cast<double>(deg[u])) * dv);
            const double* hrow = h_prev.row(u);
            for (std::size_t j = 0; j < d; ++j) zrow[j] += c * hrow[j];
        }
        const double cself = 1.0 / (dv * dv);
        const double* hrow = h_prev.row(v);
        for (std::size_t j = 0; j < d; ++j) zrow[j] += cself * hrow[j];
    }

    LayerResult r;
    r.g.push_back(matmul(z, spec.weights[0]));
    r.z.push_back(std::move(z));
    r.h = apply_activation(r.g[0], spec.activation);
    return r;
}

LayerResult sage_layer(const DenseMatrix& h_prev, const Graph& graph, const LayerSpec& spec) {
    check_input(h_prev, graph, spec, "sage_layer");
    const std::size_t n = graph.num_nodes;
    const std::size_t d = spec.in_dim;

    // Neighbor mean; an empty neighborhood contributes the zero vector.
    DenseMatrix kmat(n, d);
    for (std::size_t v = 0; v < n; ++v) {
        auto nbrs = graph.neighbors(v);
        if (nbrs.empty()) continue;
        double* krow = kmat.row(v);
        for (std::uint32_t u : nbrs) {
            const double* hrow = h_prev.row(u);
            for (std::size_t j = 0; j < d; ++j) krow[j] += hrow[j];
        }
        const double inv = 1.0 / static_cast<double>(nbrs.size());
        for (std::size_t j = 0; j < d; ++j) krow[j] *= inv;
    }

    LayerResult r;
    r.g.push_back(matmul(h_prev, spec.weights[0]));
    r.g.push_back(matmul(kmat, spec.weights[1]));
    r.z.push_back(h_prev);
    r.z.push_back(std::move(kmat));

    const std::size_t half = spec.out_dim / 2;
    DenseMatrix pre(n, spec.out_dim);
    for (std::size_t v = 0; v < n; ++v) {
        for (std::size_t j = 0; j < half; ++j) {
            pre(v, j) = r.g[0](v, j);
            pre(v, half + j) = r.g[1](v, j);
        }
    }
    r.h = apply_activation(pre, spec.activation);
    return r;
}

LayerResult gin_layer(const DenseMatrix& h_prev, const Graph& graph, const LayerSpec& spec) {
    check_input(h_prev, graph, spec, "gin_layer");
    const std::size_t n = graph.num_nodes;
    const std::size_t d = spec.in_dim;

    // k_v = h_v + sum_{u in N_v} h_u
    DenseMatrix kmat = h_prev;
    for (std::size_t v = 0; v < n; ++v) {
        double* krow = kmat.row(v);
        for (std::uint32_t u : graph.neighbors(v)) {
            const double* hrow = h_prev.row(u);
            for (std::size_t j = 0; j < d; ++j) krow[j] += hrow[j];
        }
    }

    // Inner MLP peeled one linear transform at a time: z_0 = K, and
    // z_n = relu(g_{n-1}) between inner matrices.
    LayerResult r;
    r.z.push_back(std::move(kmat));
    for (std::size_t k = 0; k < spec.weights.size(); ++k) {
        r.g.push_back(matmul(r.z[k], spec.weights[k]));
        if (k + 1 < spec.weights.size()) {
            r.z.push_back(apply_activation(r.g[k], Activation::Relu));
        }
    }
    r.h = apply_activation(r.g.back(), spec.activation);
    return r;
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> gat_attended_pairs(const Graph& graph) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    pairs.reserve(graph.num_edge_entries() + graph.num_nodes);
    for (std::size_t v = 0; v < graph.num_nodes; ++v) {
        for (std::uint32_t u : graph.neighbors(v))
            pairs.emplace_back(static_cast<std::uint32_t>(v), u);
        pairs.emplace_back(static_cast<std::uint32_t>(v), static_cast<std::uint32_t>(v));
    }
    return pairs;
}

LayerResult gat_layer(const DenseMatrix& h_prev, const Graph& graph, const LayerSpec& spec) {
    check_input(h_prev, graph, spec, "gat_layer");
    const std::size_t n = graph.num_nodes;
    const std::size_t out = spec.out_dim;
    const DenseMatrix& w = spec.weights[0];
    const DenseMatrix& a = *spec.gat_attention;

    LayerResult r;
    r.gat_q = matmul(h_prev, w);

    // Attention logits per attended pair (v, u), u over N_v then the self
    // pair: s = a^T [q_v || q_u]. The softmax runs per target node over
    // N_v ∪ {v}; a self-loop keeps isolated nodes well-defined.
    const auto pairs = gat_attended_pairs(graph);
    DenseMatrix z_edge(pairs.size(), 2 * out);
    DenseMatrix logits(pairs.size(), 1);
    double min_abs = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        const auto [v, u] = pairs[p];
        double* row = z_edge.row(p);
        const double* qv = r.gat_q.row(v);
        const double* qu = r.gat_q.row(u);
        double s = 0.0;
        for (std::size_t j = 0; j < out; ++j) {
            row[j] = qv[j];
            row[out + j] = qu[j];
            s += qv[j] * a(j, 0) + qu[j] * a(out + j, 0);
        }
        logits(p, 0) = s;
        min_abs = std::min(min_abs, std::fabs(s));
    }
    r.min_abs_attention_logit = min_abs;

    // Per-node softmax over LeakyReLU'd logits, max-shifted for stability.
    r.gat_alpha.assign(pairs.size(), 0.0);
    std::size_t p = 0;
    for (std::size_t v = 0; v < n; ++v) {
        const std::size_t count = graph.degree(v) + 1;
        double maxe = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < count; ++i)
            maxe = std::max(maxe, leaky_relu(logits(p + i, 0)));
        double denom = 0.0;
        for (std::size_t i = 0; i < count; ++i) {
            const double e = std::exp(leaky_relu(logits(p + i, 0)) - maxe);
            r.gat_alpha[p + i] = e;
            denom += e;
        }
        for (std::size_t i = 0; i < count; ++i) r.gat_alpha[p + i] /= denom;
        p += count;
    }

    // z_node[v] = sum_u alpha_uv h_u (the pre-W aggregate).
    DenseMatrix z_node(n, spec.in_dim);
    p = 0;
    for (std::size_t v = 0; v < n; ++v) {
        const std::size_t count = graph.degree(v) + 1;
        double* zrow = z_node.row(v);
        for (std::size_t i = 0; i < count; ++i) {
            const double alpha = r.gat_alpha[p + i];
            const double* hrow = h_prev.row(pairs[p + i].second);
            for (std::size_t j = 0; j < spec.in_dim; ++j) zrow[j] += alpha * hrow[j];
        }
        p += count;
    }

    r.g.push_back(matmul(z_node, w));
    r.g.push_back(std::move(logits));
    r.z.push_back(std::move(z_node));
    r.z.push_back(std::move(z_edge));
    r.h = apply_activation(r.g[0], spec.activation);
    return r;
}

LayerResult run_layer(const DenseMatrix& h_prev, const Graph& graph, const LayerSpec& spec) {
    switch (spec.arch) {
        case Arch::Gcn: return gcn_layer(h_prev, graph, spec);
        case Arch::Sage: return sage_layer(h_prev, graph, spec);
        case Arch::Gin: return gin_layer(h_prev, graph, spec);
        case Arch::Gat: return gat_layer(h_prev, graph, spec);
    }
    throw ConfigurationError("run_layer: unknown architecture");
}

ForwardResult forward(const GnnModel& model, const Graph& graph, bool capture) {
    if (!model.layers.empty() && graph.feature_dim() != model.layers.front().in_dim) {
        throw ShapeError("forward: graph feature dim " + std::to_string(graph.feature_dim()) +
                         " != layer 0 in_dim " + std::to_string(model.layers.front().in_dim));
    }
    ForwardResult out;
    out.captured = capture;
    out.min_abs_attention_logit = std::numeric_limits<double>::infinity();
    if (capture) out.trace.h0 = graph.features;

    DenseMatrix h = graph.features;
    for (std::size_t i = 0; i < model.layers.size(); ++i) {
        LayerResult lr;
        try {
            lr = run_layer(h, graph, model.layers[i]);
        } catch (const ShapeError& e) {
            throw ShapeError("layer " + std::to_string(i) + ": " + e.what());
        }
        if (model.layers[i].arch == Arch::Gat) {
            out.min_abs_attention_logit =
                std::min(out.min_abs_attention_logit, lr.min_abs_attention_logit);
        }
        h = lr.h;
        if (capture) out.trace.layers.push_back(std::move(lr));
    }
    out.embeddings = std::move(h);
    return out;
}

DenseMatrix head_forward(const DenseMatrix& embeddings, const DenseMatrix& head) {
    if (embeddings.cols() != head.rows()) {
        throw ShapeError("head_forward: embedding dim " + std::to_string(embeddings.cols()) +
                         " != head rows " + std::to_string(head.rows()));
    }
    return matmul(embeddings, head);
}

std::vector<double> decode_links(
    const DenseMatrix& embeddings,
    const std::vector<std::pair<std::uint32_t, std::uint32_t>>& pairs) {
    std::vector<double> scores;
    scores.reserve(pairs.size());
    for (const auto& [u, v] : pairs) {
        if (u >= embeddings.rows() || v >= embeddings.rows()) {
            throw ParameterError("decode_links: pair index out of range");
        }
        double dot = 0.0;
        const double* a = embeddings.row(u);
        const double* b = embeddings.row(v);
        for (std::size_t j = 0; j < embeddings.cols(); ++j) dot += a[j] * b[j];
        scores.push_back(1.0 / (1.0 + std::exp(-dot)));
    }
    return scores;
}

} // namespace gnnmerge
