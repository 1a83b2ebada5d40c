#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gnnmerge/graph.hpp"
#include "gnnmerge/linalg.hpp"
#include "gnnmerge/model.hpp"

namespace gnnmerge {

/// Sufficient statistics of the layer-independent alignment objective for
/// one (layer, transform): s_zz = sum_i Z_i^T Z_i and s_zg = sum_i Z_i^T G_i
/// over the base models, plus the accumulated row count and sum_i ||G_i||_F^2
/// so objective values can be evaluated without keeping the raw rows.
struct TransformStatistics {
    DenseMatrix s_zz; // d_in x d_in, symmetric PSD
    DenseMatrix s_zg; // d_in x d_out
    std::uint64_t row_count = 0;
    double g_norm_sq = 0.0;
};

struct MergeStatistics {
    std::vector<std::vector<TransformStatistics>> layers; // [layer][transform]
};

struct MergeConfig {
    /// Ridge added to s_zz before the solve. Unset means the scale-aware
    /// default 1e-6 x mean diagonal of the transform's s_zz.
    std::optional<double> ridge;
    double iterative_lr = 0.01;
    std::size_t iterative_steps = 500;
    /// Fraction of nodes whose embedding rows enter the statistics.
    double sample_ratio = 1.0;
    /// Use 1-hop condensation when sample_ratio < 1 (exact either way).
    bool condense = true;
    /// Seed for target sampling.
    std::uint64_t seed = 0;
};

/// Runs a capture-enabled forward of every base model on its merging graph
/// (one graph per model, or a single shared graph) and accumulates the
/// per-transform statistics in fixed model order. The merge path works on
/// label-stripped graph views and never reads supervision labels.
MergeStatistics collect_statistics(const std::vector<GnnModel>& models,
                                   const std::vector<Graph>& merging_graphs,
                                   const MergeConfig& config);

/// Analytical merge: every transform of the merged backbone solves the
/// normal equations (s_zz + ridge I) W = s_zg of the stacked least-squares
/// problem; heads of all base models are carried per task, unmerged.
GnnModel analytical_merge(const std::vector<GnnModel>& models,
                          const std::vector<Graph>& merging_graphs,
                          const MergeConfig& config);

/// Iterative merge: starts from the weight average and runs plain gradient
/// descent with gradient 2(s_zz W - s_zg), normalized by the transform's row
/// count, for iterative_steps steps at iterative_lr. Throws
/// OptimizationError when the objective rises 10 consecutive steps.
GnnModel iterative_merge(const std::vector<GnnModel>& models,
                         const std::vector<Graph>& merging_graphs,
                         const MergeConfig& config);

/// Joint alignment ablation: end-to-end Adam on the un-relaxed objective in
/// which the merged model's own previous-layer outputs feed each layer.
/// Initialization is the weight average; step budget is iterative_steps.
GnnModel joint_merge(const std::vector<GnnModel>& models,
                     const std::vector<Graph>& merging_graphs,
                     const MergeConfig& config);

/// Elementwise mean of every backbone tensor; heads carried per task.
GnnModel weight_average(const std::vector<GnnModel>& models);

/// Per-layer mean over nodes of ||h_merged - h_base||_2 with both models
/// running their own full forward pass on the graph.
std::vector<double> alignment_report(const GnnModel& merged, const GnnModel& base,
                                     const Graph& graph);

/// CSV with header "layer,mean_l2".
void write_alignment_csv(const std::vector<double>& per_layer, const std::string& path);

/// Quadratic objective of one transform at weights w:
/// <w, s_zz w> - 2 <w, s_zg> + sum_i ||G_i||_F^2.
double transform_objective(const TransformStatistics& ts, const DenseMatrix& w);

/// Sum of transform_objective over all (layer, transform) of the model.
double relaxed_quadratic_objective(const MergeStatistics& stats, const GnnModel& model);

/// Post-activation alignment objectives (sum over models, layers and nodes
/// of squared embedding distances). The joint variant feeds each layer the
/// merged model's own previous outputs; the relaxed variant feeds the base
/// model's. For 1-layer models the two coincide.
double joint_alignment_objective(const GnnModel& merged, const std::vector<GnnModel>& models,
                                 const std::vector<Graph>& merging_graphs);
double relaxed_alignment_objective(const GnnModel& merged,
                                   const std::vector<GnnModel>& models,
                                   const std::vector<Graph>& merging_graphs);

} // namespace gnnmerge
