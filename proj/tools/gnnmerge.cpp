// Command-line pipeline: synthetic data generation, base-model training,
// merging, evaluation, benchmarking and embedding export. Exit codes:
// 0 success, 1 usage error, 2 runtime error. Logs go to stderr, results to
// stdout or --out paths.

#include <algorithm>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gnnmerge/errors.hpp"
#include "gnnmerge/eval.hpp"
#include "gnnmerge/graph.hpp"
#include "gnnmerge/layers.hpp"
#include "gnnmerge/merge.hpp"
#include "gnnmerge/model.hpp"
#include "gnnmerge/rng.hpp"
#include "gnnmerge/splits.hpp"
#include "gnnmerge/synth.hpp"
#include "gnnmerge/trainer.hpp"

namespace {

using namespace gnnmerge;

struct GenDataArgs {
    std::size_t blocks = 4;
    std::size_t block_size = 100;
    double p_in = 0.3;
    double p_out = 0.02;
    std::size_t feature_dim = 16;
    double noise_sigma = 1.0;
    std::uint64_t seed = 0;
    std::string split_mode = "disjoint-labels";
    std::string out_prefix;
};

int run_gen_data(const GenDataArgs& a) {
    std::cerr << "[gen-data] blocks=" << a.blocks << " block-size=" << a.block_size
              << " p-in=" << a.p_in << " p-out=" << a.p_out << " feature-dim=" << a.feature_dim
              << " noise-sigma=" << a.noise_sigma << " split=" << a.split_mode
              << " seed=" << a.seed << " out=" << a.out_prefix << "*\n";
    const Graph g = generate_sbm(a.blocks, a.block_size, a.p_in, a.p_out, a.feature_dim,
                                 a.noise_sigma, a.seed);
    save_graph(g, a.out_prefix + ".gnmg");
    if (a.split_mode == "disjoint-labels") {
        const DisjointLabelSplit d = disjoint_label_split(g, a.seed);
        save_graph(d.task_a.graph, a.out_prefix + "_taskA.gnmg");
        save_node_split(d.task_a.split, a.out_prefix + "_taskA.split.json");
        save_graph(d.task_b.graph, a.out_prefix + "_taskB.gnmg");
        save_node_split(d.task_b.split, a.out_prefix + "_taskB.split.json");
    } else if (a.split_mode == "node-split") {
        std::vector<std::uint32_t> labeled;
        std::int32_t max_label = -1;
        for (std::size_t v = 0; v < g.num_nodes; ++v) {
            if (g.labels[v] >= 0) {
                labeled.push_back(static_cast<std::uint32_t>(v));
                max_label = std::max(max_label, g.labels[v]);
            }
        }
        Rng rng(a.seed);
        shuffle(labeled, rng);
        NodeSplit s;
        s.num_classes = static_cast<std::size_t>(max_label) + 1;
        const std::size_t n_train = static_cast<std::size_t>(0.6 * labeled.size());
        const std::size_t n_val = static_cast<std::size_t>(0.2 * labeled.size());
        s.train.assign(labeled.begin(), labeled.begin() + n_train);
        s.val.assign(labeled.begin() + n_train, labeled.begin() + n_train + n_val);
        s.test.assign(labeled.begin() + n_train + n_val, labeled.end());
        std::sort(s.train.begin(), s.train.end());
        std::sort(s.val.begin(), s.val.end());
        std::sort(s.test.begin(), s.test.end());
        save_node_split(s, a.out_prefix + ".split.json");
    } else if (a.split_mode == "link-split") {
        save_edge_split(link_split(g, a.seed), a.out_prefix + ".split.json");
    } else {
        throw ConfigurationError("unknown split mode '" + a.split_mode + "'");
    }
    return 0;
}

TaskSpec load_task(const std::string& task_id, const std::string& split_path) {
    TaskSpec task;
    task.task_id = task_id;
    if (split_file_kind(split_path) == "node") {
        task.kind = TaskKind::NodeClassification;
        task.node_split = load_node_split(split_path);
        task.num_classes = task.node_split.num_classes;
    } else {
        task.kind = TaskKind::LinkPrediction;
        task.edge_split = load_edge_split(split_path);
    }
    return task;
}

struct TrainArgs {
    std::string graph_path;
    std::string split_path;
    std::string arch = "gcn";
    std::string task_id = "task";
    std::size_t layers = 2;
    std::size_t hidden = 128;
    double lr = 0.05;
    std::size_t epochs = 200;
    std::uint64_t seed = 0;
    std::string out;
};

int run_train(const TrainArgs& a) {
    std::cerr << "[train] graph=" << a.graph_path << " split=" << a.split_path
              << " arch=" << a.arch << " task-id=" << a.task_id << " layers=" << a.layers
              << " hidden=" << a.hidden << " lr=" << a.lr << " epochs=" << a.epochs
              << " seed=" << a.seed << " out=" << a.out << "\n";
    const Graph g = load_graph(a.graph_path);
    TrainConfig config;
    config.arch = arch_from_name(a.arch);
    config.num_layers = a.layers;
    config.hidden_dim = a.hidden;
    config.learning_rate = a.lr;
    config.epochs = a.epochs;
    config.seed = a.seed;
    config.task = load_task(a.task_id, a.split_path);
    const GnnModel model = train(g, config, &std::cerr);
    save_model(model, a.out);
    return 0;
}

struct MergeArgs {
    std::string method = "analytical";
    std::vector<std::string> models;
    std::vector<std::string> graphs;
    std::optional<double> ridge;
    double iter_lr = 0.01;
    std::size_t iter_steps = 500;
    double sample_ratio = 1.0;
    bool no_condense = false;
    std::uint64_t seed = 0;
    std::string out;
};

int run_merge(const MergeArgs& a) {
    std::cerr << "[merge] method=" << a.method << " models=" << a.models.size()
              << " graphs=" << a.graphs.size() << " sample-ratio=" << a.sample_ratio
              << " seed=" << a.seed << " out=" << a.out << "\n";
    std::vector<GnnModel> models;
    for (const auto& path : a.models) models.push_back(load_model(path));
    std::vector<Graph> graphs;
    for (const auto& path : a.graphs) graphs.push_back(load_graph(path));

    MergeConfig config;
    config.ridge = a.ridge;
    config.iterative_lr = a.iter_lr;
    config.iterative_steps = a.iter_steps;
    config.sample_ratio = a.sample_ratio;
    config.condense = !a.no_condense;
    config.seed = a.seed;

    GnnModel merged;
    if (a.method == "analytical") {
        merged = analytical_merge(models, graphs, config);
    } else if (a.method == "iterative") {
        merged = iterative_merge(models, graphs, config);
    } else if (a.method == "joint") {
        merged = joint_merge(models, graphs, config);
    } else if (a.method == "wavg") {
        merged = weight_average(models);
    } else {
        throw ConfigurationError("unknown merge method '" + a.method + "'");
    }
    save_model(merged, a.out);
    return 0;
}

struct EvalArgs {
    std::string model_path;
    std::vector<std::string> task_ids;
    std::vector<std::string> graphs;
    std::vector<std::string> splits;
    std::string base_path;
    std::string alignment_csv;
    std::string out_csv;
};

int run_eval(const EvalArgs& a) {
    std::cerr << "[eval] model=" << a.model_path << " tasks=" << a.task_ids.size()
              << (a.base_path.empty() ? "" : " base=" + a.base_path)
              << (a.out_csv.empty() ? "" : " out=" + a.out_csv) << "\n";
    if (a.task_ids.size() != a.graphs.size() || a.task_ids.size() != a.splits.size()) {
        throw ConfigurationError("eval: --task-id, --graph and --split must repeat together");
    }
    const GnnModel model = load_model(a.model_path);
    std::vector<std::pair<TaskSpec, Graph>> tasks;
    for (std::size_t i = 0; i < a.task_ids.size(); ++i)
        tasks.emplace_back(load_task(a.task_ids[i], a.splits[i]), load_graph(a.graphs[i]));

    EvalReport report = evaluate_merged(model, tasks);
    if (!a.base_path.empty()) {
        if (tasks.empty()) throw ConfigurationError("eval: alignment needs at least one task");
        const GnnModel base = load_model(a.base_path);
        report.alignment = alignment_report(model, base, tasks.front().second);
        if (!a.alignment_csv.empty()) write_alignment_csv(report.alignment, a.alignment_csv);
    }
    std::cout << format_report(report);
    if (!a.out_csv.empty()) write_report_csv(report, a.out_csv);
    return 0;
}

struct BenchArgs {
    std::vector<std::string> models;
    std::vector<std::string> graphs;
    std::string scratch_graph;
    std::string scratch_split;
    std::string arch = "gcn";
    std::string task_id = "union";
    std::size_t layers = 2;
    std::size_t hidden = 64;
    double lr = 0.05;
    std::size_t epochs = 200;
    std::uint64_t seed = 0;
    std::optional<double> ridge;
    double sample_ratio = 1.0;
};

int run_bench(const BenchArgs& a) {
    std::cerr << "[bench] models=" << a.models.size() << " scratch-graph=" << a.scratch_graph
              << " epochs=" << a.epochs << " seed=" << a.seed << "\n";
    std::vector<GnnModel> models;
    for (const auto& path : a.models) models.push_back(load_model(path));
    std::vector<Graph> graphs;
    for (const auto& path : a.graphs) graphs.push_back(load_graph(path));

    TrainConfig scratch;
    scratch.arch = arch_from_name(a.arch);
    scratch.num_layers = a.layers;
    scratch.hidden_dim = a.hidden;
    scratch.learning_rate = a.lr;
    scratch.epochs = a.epochs;
    scratch.seed = a.seed;
    scratch.task = load_task(a.task_id, a.scratch_split);

    MergeConfig merge_config;
    merge_config.ridge = a.ridge;
    merge_config.sample_ratio = a.sample_ratio;
    merge_config.seed = a.seed;

    const EvalReport report =
        bench_merge(models, graphs, load_graph(a.scratch_graph), scratch, merge_config);
    std::cout << format_report(report);
    return 0;
}

struct ExportArgs {
    std::string model_path;
    std::string graph_path;
    std::string out;
};

int run_export(const ExportArgs& a) {
    std::cerr << "[export-emb] model=" << a.model_path << " graph=" << a.graph_path
              << " out=" << a.out << "\n";
    export_embeddings(load_model(a.model_path), load_graph(a.graph_path), a.out);
    return 0;
}

struct GradCheckArgs {
    std::string graph_path;
    std::string split_path;
    std::string arch = "gcn";
    std::string task_id = "task";
    std::size_t layers = 2;
    std::size_t hidden = 16;
    std::size_t coords = 50;
    std::uint64_t seed = 0;
};

int run_grad_check(const GradCheckArgs& a) {
    std::cerr << "[grad-check] graph=" << a.graph_path << " split=" << a.split_path
              << " arch=" << a.arch << " coords=" << a.coords << " seed=" << a.seed << "\n";
    const Graph g = load_graph(a.graph_path);
    TrainConfig config;
    config.arch = arch_from_name(a.arch);
    config.num_layers = a.layers;
    config.hidden_dim = a.hidden;
    config.seed = a.seed;
    config.task = load_task(a.task_id, a.split_path);
    const GnnModel model = init_model(g, config);
    const double err = grad_check(model, g, config.task, a.coords, a.seed);
    std::cout << "max relative gradient error: " << err << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"gnnmerge: train, merge and evaluate message-passing GNNs"};
    app.require_subcommand(1);

    GenDataArgs gen;
    auto* cmd_gen = app.add_subcommand("gen-data", "Generate a synthetic SBM graph + splits");
    cmd_gen->add_option("--blocks", gen.blocks, "Number of SBM blocks");
    cmd_gen->add_option("--block-size", gen.block_size, "Nodes per block");
    cmd_gen->add_option("--p-in", gen.p_in, "Within-block edge probability");
    cmd_gen->add_option("--p-out", gen.p_out, "Cross-block edge probability");
    cmd_gen->add_option("--feature-dim", gen.feature_dim, "Node feature dimension");
    cmd_gen->add_option("--noise-sigma", gen.noise_sigma, "Feature noise stddev");
    cmd_gen->add_option("--seed", gen.seed, "RNG seed");
    cmd_gen->add_option("--split", gen.split_mode,
                        "Split mode: disjoint-labels|node-split|link-split");
    cmd_gen->add_option("--out-prefix", gen.out_prefix, "Output path prefix")->required();

    TrainArgs tr;
    auto* cmd_train = app.add_subcommand("train", "Train a base model (full-batch Adam)");
    cmd_train->add_option("--graph", tr.graph_path, "Graph file")->required();
    cmd_train->add_option("--split", tr.split_path, "Split file (node or link)")->required();
    cmd_train->add_option("--arch", tr.arch, "gcn|sage|gin|gat");
    cmd_train->add_option("--task-id", tr.task_id, "Task id for the head");
    cmd_train->add_option("--layers", tr.layers, "Number of GNN layers");
    cmd_train->add_option("--hidden", tr.hidden, "Hidden dimension");
    cmd_train->add_option("--lr", tr.lr, "Learning rate");
    cmd_train->add_option("--epochs", tr.epochs, "Training epochs");
    cmd_train->add_option("--seed", tr.seed, "RNG seed");
    cmd_train->add_option("--out", tr.out, "Output model file")->required();

    MergeArgs mg;
    auto* cmd_merge = app.add_subcommand("merge", "Merge base models into one model");
    cmd_merge->add_option("--method", mg.method, "analytical|iterative|joint|wavg");
    cmd_merge->add_option("--model", mg.models, "Model file (repeat per base model)")
        ->required();
    cmd_merge->add_option("--graph", mg.graphs,
                          "Merging graph (one shared, or one per model, paired by position)");
    cmd_merge->add_option("--ridge", mg.ridge,
                          "Ridge added to s_zz (default: 1e-6 x mean diagonal)");
    cmd_merge->add_option("--iter-lr", mg.iter_lr, "Iterative merge learning rate");
    cmd_merge->add_option("--iter-steps", mg.iter_steps, "Iterative/joint step budget");
    cmd_merge->add_option("--sample-ratio", mg.sample_ratio, "Target-node sampling ratio");
    cmd_merge->add_flag("--no-condense", mg.no_condense,
                        "Disable 1-hop condensation when sampling");
    cmd_merge->add_option("--seed", mg.seed, "Sampling seed");
    cmd_merge->add_option("--out", mg.out, "Output model file")->required();

    EvalArgs ev;
    auto* cmd_eval = app.add_subcommand("eval", "Evaluate a model on one or more tasks");
    cmd_eval->add_option("--model", ev.model_path, "Model file")->required();
    cmd_eval->add_option("--task-id", ev.task_ids, "Task id (repeat per task)")->required();
    cmd_eval->add_option("--graph", ev.graphs, "Task graph (repeat, paired)")->required();
    cmd_eval->add_option("--split", ev.splits, "Task split (repeat, paired)")->required();
    cmd_eval->add_option("--base", ev.base_path,
                         "Base model for a per-layer alignment report");
    cmd_eval->add_option("--alignment-csv", ev.alignment_csv, "Alignment CSV output");
    cmd_eval->add_option("--out", ev.out_csv, "Report CSV output");

    BenchArgs bn;
    auto* cmd_bench = app.add_subcommand("bench", "Time scratch training vs merging");
    cmd_bench->add_option("--model", bn.models, "Pretrained model (repeat)")->required();
    cmd_bench->add_option("--graph", bn.graphs, "Merging graph(s)")->required();
    cmd_bench->add_option("--scratch-graph", bn.scratch_graph, "Union-task graph")->required();
    cmd_bench->add_option("--scratch-split", bn.scratch_split, "Union-task split")->required();
    cmd_bench->add_option("--arch", bn.arch, "gcn|sage|gin|gat");
    cmd_bench->add_option("--task-id", bn.task_id, "Union task id");
    cmd_bench->add_option("--layers", bn.layers, "Scratch model layers");
    cmd_bench->add_option("--hidden", bn.hidden, "Scratch hidden dimension");
    cmd_bench->add_option("--lr", bn.lr, "Scratch learning rate");
    cmd_bench->add_option("--epochs", bn.epochs, "Scratch training epochs");
    cmd_bench->add_option("--seed", bn.seed, "RNG seed");
    cmd_bench->add_option("--ridge", bn.ridge, "Merge ridge");
    cmd_bench->add_option("--sample-ratio", bn.sample_ratio, "Merge sampling ratio");

    ExportArgs ex;
    auto* cmd_export = app.add_subcommand("export-emb", "Export final-layer embeddings as CSV");
    cmd_export->add_option("--model", ex.model_path, "Model file")->required();
    cmd_export->add_option("--graph", ex.graph_path, "Graph file")->required();
    cmd_export->add_option("--out", ex.out, "CSV output path")->required();

    GradCheckArgs gc;
    auto* cmd_gc = app.add_subcommand("grad-check", "Finite-difference gradient verification");
    cmd_gc->add_option("--graph", gc.graph_path, "Graph file")->required();
    cmd_gc->add_option("--split", gc.split_path, "Split file")->required();
    cmd_gc->add_option("--arch", gc.arch, "gcn|sage|gin|gat");
    cmd_gc->add_option("--task-id", gc.task_id, "Task id");
    cmd_gc->add_option("--layers", gc.layers, "Number of layers");
    cmd_gc->add_option("--hidden", gc.hidden, "Hidden dimension");
    cmd_gc->add_option("--coords", gc.coords, "Sampled coordinates");
    cmd_gc->add_option("--seed", gc.seed, "RNG seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e); // prints help, exit 0
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (cmd_gen->parsed()) return run_gen_data(gen);
        if (cmd_train->parsed()) return run_train(tr);
        if (cmd_merge->parsed()) return run_merge(mg);
        if (cmd_eval->parsed()) return run_eval(ev);
        if (cmd_bench->parsed()) return run_bench(bn);
        if (cmd_export->parsed()) return run_export(ex);
        if (cmd_gc->parsed()) return run_grad_check(gc);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
