#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gnnmerge/linalg.hpp"

namespace gnnmerge {

enum class Arch { Gcn, Sage, Gin, Gat };
enum class Activation { Relu, Identity };

std::string arch_name(Arch a);
Arch arch_from_name(const std::string& name);

/// One message-passing layer. The weights list holds the layer's learnable
/// linear transforms in solve order:
///   GCN  [W]               W is in_dim x out_dim
///   SAGE [W1, W2]          each in_dim x out_dim/2 (out_dim must be even)
///   GIN  [W_1 .. W_N]      inner-MLP chain composing in_dim -> ... -> out_dim
///   GAT  [W]               in_dim x out_dim, plus gat_attention (2*out_dim x 1)
struct LayerSpec {
    Arch arch = Arch::Gcn;
    std::size_t in_dim = 0;
    std::size_t out_dim = 0;
    std::vector<DenseMatrix> weights;
    std::optional<DenseMatrix> gat_attention;
    Activation activation = Activation::Relu;

    /// Number of learnable transforms (GAT counts the attention vector).
    std::size_t num_transforms() const {
        return weights.size() + (gat_attention ? 1 : 0);
    }
};

struct GnnModel {
    std::vector<LayerSpec> layers;
    std::map<std::string, DenseMatrix> heads; // task-id -> embedding_dim x output_dim
    std::map<std::string, std::string> metadata;

    std::size_t input_dim() const { return layers.empty() ? 0 : layers.front().in_dim; }
    std::size_t embedding_dim(std::size_t fallback) const {
        return layers.empty() ? fallback : layers.back().out_dim;
    }
    std::size_t backbone_parameter_count() const;
};

/// Checks weight shapes against the architecture, the layer dimension chain,
/// and head row counts. Throws ShapeError / ConfigurationError.
void validate_model(const GnnModel& m);

/// Compares the learnable skeletons (arch, dims, transform count and shapes)
/// of two models. Returns the index of the first differing layer, or -1 when
/// the skeletons match (head dimensions are not part of the skeleton).
int first_skeleton_mismatch(const GnnModel& a, const GnnModel& b);

/// Describes layer i of m for error messages, e.g. "gcn 16->32 (k=1)".
std::string describe_layer(const GnnModel& m, std::size_t i);

// Model binary format (little-endian): magic "GNMM", version u32 = 1,
// u32 metadata length + UTF-8 metadata blob of key=value lines (arch, layer
// dims, K per layer, head ids and dims, seed), then all weight matrices as
// f64[] row-major in declaration order: layer-major, transform-minor, the
// GAT attention vector after W, heads last in sorted task-id order.
void save_model(const GnnModel& m, const std::string& path);
GnnModel load_model(const std::string& path);

} // namespace gnnmerge
