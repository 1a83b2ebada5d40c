#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "gnnmerge/graph.hpp"
#include "gnnmerge/linalg.hpp"
#include "gnnmerge/model.hpp"

namespace gnnmerge {

constexpr double kLeakyReluSlope = 0.2;

double relu(double x);
double leaky_relu(double x);
DenseMatrix apply_activation(const DenseMatrix& m, Activation act);

/// Everything one layer evaluation produces. z[k]/g[k] are the captured
/// transform inputs and outputs (g[k] == z[k] * W_k bit-for-bit, since that
/// is how they are computed); h is the post-activation output. The GAT extras
/// are retained for the backward pass.
///
/// Transform layout per architecture:
///   GCN  k=0 z: degree-normalized aggregate (n x in)
///   SAGE k=0 z: previous embeddings, k=1 z: neighbor means
///   GIN  k=n z: input of inner matrix n (z_0 = K, z_n = relu(g_{n-1}))
///   GAT  k=0 z: attention-weighted aggregate (n x in)
///        k=1 z: per attended pair [W h_v || W h_u] (rows x 2*out); g is the
///        raw attention logit before the LeakyReLU
struct LayerResult {
    DenseMatrix h;
    std::vector<DenseMatrix> z;
    std::vector<DenseMatrix> g;
    // GAT backward context: per attended pair, v-major (CSR neighbor order,
    // self pair last). alpha are the softmax coefficients.
    std::vector<double> gat_alpha;
    DenseMatrix gat_q; // H_prev * W
    double min_abs_attention_logit = 0.0;
};

LayerResult gcn_layer(const DenseMatrix& h_prev, const Graph& graph, const LayerSpec& spec);
LayerResult sage_layer(const DenseMatrix& h_prev, const Graph& graph, const LayerSpec& spec);
LayerResult gin_layer(const DenseMatrix& h_prev, const Graph& graph, const LayerSpec& spec);
LayerResult gat_layer(const DenseMatrix& h_prev, const Graph& graph, const LayerSpec& spec);

LayerResult run_layer(const DenseMatrix& h_prev, const Graph& graph, const LayerSpec& spec);

/// Stacked per-layer captures from one forward pass; h0 is the input feature
/// matrix.
struct ActivationTrace {
    DenseMatrix h0;
    std::vector<LayerResult> layers;

    const DenseMatrix& layer_input(std::size_t layer) const {
        return layer == 0 ? h0 : layers[layer - 1].h;
    }
};

struct ForwardResult {
    DenseMatrix embeddings;
    ActivationTrace trace; // populated only when capture was requested
    bool captured = false;
    // Min |attention logit| over all GAT layers (infinity when none); lets
    // finite-difference checks skip coordinates near a LeakyReLU kink.
    double min_abs_attention_logit = 0.0;
};

/// Chains the model's layers over the graph, h0 = features. The computation
/// is identical with and without capture; capture only retains the
/// intermediate tensors.
ForwardResult forward(const GnnModel& model, const Graph& graph, bool capture);

/// logits = embeddings * head.
DenseMatrix head_forward(const DenseMatrix& embeddings, const DenseMatrix& head);

/// score(u, v) = sigmoid(<emb_u, emb_v>).
std::vector<double> decode_links(const DenseMatrix& embeddings,
                                 const std::vector<std::pair<std::uint32_t, std::uint32_t>>& pairs);

/// Attended pairs of a GAT layer in capture order: neighbors in CSR order,
/// then the self pair, grouped by target node.
std::vector<std::pair<std::uint32_t, std::uint32_t>> gat_attended_pairs(const Graph& graph);

} // namespace gnnmerge
