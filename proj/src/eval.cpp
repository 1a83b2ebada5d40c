#include "gnnmerge/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "gnnmerge/errors.hpp"
#include "gnnmerge/layers.hpp"

namespace gnnmerge {

double accuracy(const DenseMatrix& logits, const std::vector<std::int32_t>& labels,
                const std::vector<std::uint32_t>& mask) {
    if (mask.empty()) throw ParameterError("accuracy: empty mask");
    std::size_t correct = 0;
    for (std::uint32_t v : mask) {
        if (v >= logits.rows() || v >= labels.size()) {
            throw ParameterError("accuracy: mask index " + std::to_string(v) + " out of range");
        }
        const double* row = logits.row(v);
        std::size_t best = 0;
        for (std::size_t j = 1; j < logits.cols(); ++j) {
            if (row[j] > row[best]) best = j; // ties keep the lowest index
        }
        if (labels[v] >= 0 && static_cast<std::size_t>(labels[v]) == best) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(mask.size());
}

double roc_auc(const std::vector<double>& scores, const std::vector<int>& binary_labels) {
    if (scores.size() != binary_labels.size()) {
        throw ParameterError("roc_auc: scores and labels differ in length");
    }
    std::size_t num_pos = 0, num_neg = 0;
    for (int y : binary_labels) (y != 0 ? num_pos : num_neg)++;
    if (num_pos == 0 || num_neg == 0) {
        throw ParameterError("roc_auc: both classes must be present");
    }

    // Midrank form of the Mann-Whitney statistic.
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&scores](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double midrank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) {
            if (binary_labels[order[k]] != 0) rank_sum_pos += midrank;
        }
        i = j + 1;
    }
    const double np = static_cast<double>(num_pos);
    const double nn = static_cast<double>(num_neg);
    return (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * nn);
}

EvalRow evaluate_task(const GnnModel& model, const TaskSpec& task, const Graph& graph) {
    auto it = model.heads.find(task.task_id);
    if (it == model.heads.end()) {
        throw ConfigurationError("evaluate: model has no head for task '" + task.task_id + "'");
    }
    const ForwardResult fwd = forward(model, graph, /*capture=*/false);
    EvalRow row;
    row.task_id = task.task_id;
    if (task.kind == TaskKind::NodeClassification) {
        const DenseMatrix logits = head_forward(fwd.embeddings, it->second);
        row.metric = "accuracy";
        row.value = accuracy(logits, graph.labels, task.node_split.test);
    } else {
        const DenseMatrix proj = head_forward(fwd.embeddings, it->second);
        std::vector<EdgePair> pairs = task.edge_split.test.pos;
        pairs.insert(pairs.end(), task.edge_split.test.neg.begin(),
                     task.edge_split.test.neg.end());
        std::vector<int> labels(task.edge_split.test.pos.size(), 1);
        labels.resize(pairs.size(), 0);
        row.metric = "roc_auc";
        row.value = roc_auc(decode_links(proj, pairs), labels);
    }
    return row;
}

EvalReport evaluate_merged(const GnnModel& merged,
                           const std::vector<std::pair<TaskSpec, Graph>>& tasks) {
    EvalReport report;
    for (const auto& [task, graph] : tasks)
        report.rows.push_back(evaluate_task(merged, task, graph));
    return report;
}

EvalReport bench_merge(const std::vector<GnnModel>& models,
                       const std::vector<Graph>& merging_graphs, const Graph& scratch_graph,
                       const TrainConfig& scratch_config, const MergeConfig& merge_config) {
    using clock = std::chrono::steady_clock;
    auto seconds = [](clock::time_point a, clock::time_point b) {
        return std::chrono::duration<double>(b - a).count();
    };

    BenchTimings t;
    auto t0 = clock::now();
    const GnnModel scratch = train(scratch_graph, scratch_config);
    auto t1 = clock::now();
    t.scratch_train_s = seconds(t0, t1);

    t0 = clock::now();
    const GnnModel analytical = analytical_merge(models, merging_graphs, merge_config);
    t1 = clock::now();
    t.analytical_merge_s = seconds(t0, t1);

    t0 = clock::now();
    const GnnModel iterative = iterative_merge(models, merging_graphs, merge_config);
    t1 = clock::now();
    t.iterative_merge_s = seconds(t0, t1);

    (void)scratch;
    (void)analytical;
    (void)iterative;

    EvalReport report;
    report.timings = t;
    return report;
}

void export_embeddings(const GnnModel& model, const Graph& graph, const std::string& path) {
    const ForwardResult fwd = forward(model, graph, /*capture=*/false);
    const DenseMatrix& emb = fwd.embeddings;
    std::ofstream out(path);
    if (!out) throw FormatError("cannot open " + path + " for writing");
    out << "node_id";
    for (std::size_t j = 0; j < emb.cols(); ++j) out << ",dim_" << j;
    out << "\n";
    char buf[64];
    for (std::size_t v = 0; v < emb.rows(); ++v) {
        out << v;
        for (std::size_t j = 0; j < emb.cols(); ++j) {
            std::snprintf(buf, sizeof(buf), ",%.9g", emb(v, j));
            out << buf;
        }
        out << "\n";
    }
    if (!out) throw FormatError("write failure while exporting embeddings to " + path);
}

std::string format_report(const EvalReport& report) {
    std::ostringstream os;
    std::size_t id_width = 7;
    for (const auto& row : report.rows) id_width = std::max(id_width, row.task_id.size());
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%-*s  %-8s  %-10s  %s\n", static_cast<int>(id_width),
                  "task", "metric", "value", "split");
    os << buf;
    for (const auto& row : report.rows) {
        std::snprintf(buf, sizeof(buf), "%-*s  %-8s  %-10.6f  %s\n",
                      static_cast<int>(id_width), row.task_id.c_str(), row.metric.c_str(),
                      row.value, row.split.c_str());
        os << buf;
    }
    if (!report.alignment.empty()) {
        os << "alignment mean_l2 per layer:";
        for (std::size_t l = 0; l < report.alignment.size(); ++l) {
            std::snprintf(buf, sizeof(buf), " layer%zu=%.6g", l + 1, report.alignment[l]);
            os << buf;
        }
        os << "\n";
    }
    if (report.timings) {
        const auto& t = *report.timings;
        std::snprintf(buf, sizeof(buf),
                      "timings: scratch_train=%.3fs analytical_merge=%.3fs "
                      "iterative_merge=%.3fs\n",
                      t.scratch_train_s, t.analytical_merge_s, t.iterative_merge_s);
        os << buf;
        if (t.analytical_merge_s > 0.0 && t.iterative_merge_s > 0.0) {
            std::snprintf(buf, sizeof(buf),
                          "speedup: scratch/analytical=%.2fx scratch/iterative=%.2fx\n",
                          t.scratch_train_s / t.analytical_merge_s,
                          t.scratch_train_s / t.iterative_merge_s);
            os << buf;
        }
    }
    return os.str();
}

void write_report_csv(const EvalReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot open " + path + " for writing");
    out << "task_id,metric,value,split\n";
    char buf[64];
    for (const auto& row : report.rows) {
        std::snprintf(buf, sizeof(buf), ",%s,%.9g,%s\n", row.metric.c_str(), row.value,
                      row.split.c_str());
        out << row.task_id << buf;
    }
}

} // namespace gnnmerge
