#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gnnmerge/graph.hpp"
#include "gnnmerge/merge.hpp"
#include "gnnmerge/model.hpp"
#include "gnnmerge/trainer.hpp"

namespace gnnmerge {

struct EvalRow {
    std::string task_id;
    std::string metric; // "accuracy" | "roc_auc"
    double value = 0.0;
    std::string split = "test";
};

struct BenchTimings {
    double scratch_train_s = 0.0;
    double analytical_merge_s = 0.0;
    double iterative_merge_s = 0.0;
};

struct EvalReport {
    std::vector<EvalRow> rows;
    std::vector<double> alignment; // per-layer mean L2, when requested
    std::optional<BenchTimings> timings;
};

/// Fraction of masked nodes whose argmax logit equals the label; argmax ties
/// break toward the lowest class index. Throws ParameterError on an empty
/// mask.
double accuracy(const DenseMatrix& logits, const std::vector<std::int32_t>& labels,
                const std::vector<std::uint32_t>& mask);

/// Mann-Whitney ROC-AUC: probability a random positive outscores a random
/// negative, ties counted 1/2. Both classes must be present.
double roc_auc(const std::vector<double>& scores, const std::vector<int>& binary_labels);

/// One forward per task graph, head/decoder applied, task metric on the test
/// split. The model must carry a head for every task id.
EvalReport evaluate_merged(const GnnModel& merged,
                           const std::vector<std::pair<TaskSpec, Graph>>& tasks);

/// Evaluates one task (used by evaluate_merged and the CLI).
EvalRow evaluate_task(const GnnModel& model, const TaskSpec& task, const Graph& graph);

/// Wall-clock comparison of training the union task from scratch against
/// analytical and iterative merging of pretrained models. Timed regions
/// cover exactly the train() call and the merge calls (statistics collection
/// included, file I/O excluded).
EvalReport bench_merge(const std::vector<GnnModel>& models,
                       const std::vector<Graph>& merging_graphs, const Graph& scratch_graph,
                       const TrainConfig& scratch_config, const MergeConfig& merge_config);

/// CSV export of final-layer embeddings: header node_id,dim_0..dim_{D-1},
/// rows in node order, 9 significant digits.
void export_embeddings(const GnnModel& model, const Graph& graph, const std::string& path);

/// Aligned text table of the report rows (and timings when present).
std::string format_report(const EvalReport& report);

/// CSV rows "task_id,metric,value,split".
void write_report_csv(const EvalReport& report, const std::string& path);

} // namespace gnnmerge
