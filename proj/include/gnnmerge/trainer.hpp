#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gnnmerge/graph.hpp"
#include "gnnmerge/layers.hpp"
#include "gnnmerge/model.hpp"
#include "gnnmerge/splits.hpp"

namespace gnnmerge {

enum class TaskKind { NodeClassification, LinkPrediction };

struct TaskSpec {
    TaskKind kind = TaskKind::NodeClassification;
    std::string task_id = "task";
    NodeSplit node_split; // node classification
    EdgeSplit edge_split; // link prediction
    std::size_t num_classes = 0;
};

/// Full-batch Adam training configuration. Adam runs with beta = (0.9,
/// 0.999) and eps = 1e-8.
struct TrainConfig {
    Arch arch = Arch::Gcn;
    std::size_t num_layers = 2;
    std::size_t hidden_dim = 128;
    double learning_rate = 0.05;
    std::size_t epochs = 200;
    std::uint64_t seed = 0;
    TaskSpec task;
};

/// Gradient (or update) container mirroring a model's weight layout.
struct ModelGrads {
    std::vector<std::vector<DenseMatrix>> layer_weights;
    std::vector<std::optional<DenseMatrix>> gat_attention;
    std::map<std::string, DenseMatrix> heads;
};

ModelGrads zero_grads_like(const GnnModel& model);

/// Glorot-uniform initialized model for the config's task: num_layers layers
/// of hidden_dim (ReLU between layers, identity after the last) plus a task
/// head. NC heads map hidden -> num_classes; LP heads are square
/// hidden -> hidden projections feeding the dot-product decoder.
GnnModel init_model(const Graph& graph, const TrainConfig& config);

/// Full-batch training for config.epochs steps; deterministic per seed.
/// Per-epoch loss lines go to *log when given.
GnnModel train(const Graph& graph, const TrainConfig& config, std::ostream* log = nullptr);

struct LossResult {
    double loss = 0.0;
    ModelGrads grads;
    double min_abs_attention_logit = 0.0;
};

/// Loss and reverse-accumulation gradients for every weight tensor (heads
/// not used by the task get zero gradients). Throws NumericError naming the
/// first non-finite tensor when the loss is NaN.
LossResult loss_and_grad(const GnnModel& model, const Graph& graph, const TaskSpec& task);

double loss_only(const GnnModel& model, const Graph& graph, const TaskSpec& task,
                 double* min_abs_attention_logit = nullptr);

/// Central finite differences (h = 1e-5) at num_coords coordinates sampled
/// uniformly across all weight tensors. Returns the max relative error
/// |analytic - numeric| / max(|analytic|, |numeric|, 1e-8). Coordinates whose
/// evaluations come within 1e-6 of a LeakyReLU kink are re-sampled.
double grad_check(const GnnModel& model, const Graph& graph, const TaskSpec& task,
                  std::size_t num_coords, std::uint64_t seed);

/// Backward rule of one layer: given dL/dh, accumulates the layer's weight
/// gradients and returns dL/dh_prev. fwd must come from the matching forward
/// evaluation on h_prev.
struct LayerGrads {
    std::vector<DenseMatrix> weights;
    std::optional<DenseMatrix> gat_attention;
};
LayerGrads layer_backward(const LayerSpec& spec, const Graph& graph,
                          const DenseMatrix& h_prev, const LayerResult& fwd,
                          const DenseMatrix& dh, DenseMatrix& dh_prev_out);

/// Adam optimizer over a model's weight tensors (fixed iteration order:
/// layers, transform-minor, attention after W, heads in sorted id order).
class AdamOptimizer {
public:
    AdamOptimizer(const GnnModel& model, double learning_rate);
    void step(GnnModel& model, const ModelGrads& grads);

private:
    double lr_;
    std::size_t t_ = 0;
    ModelGrads m_;
    ModelGrads v_;
};

} // namespace gnnmerge
