#include <doctest.h>

#include <cmath>
#include <fstream>

#include "gnnmerge/errors.hpp"
#include "gnnmerge/eval.hpp"
#include "gnnmerge/splits.hpp"
#include "gnnmerge/synth.hpp"
#include "test_util.hpp"

using namespace gnnmerge;

TEST_CASE("accuracy") {
    SUBCASE("one-hot logits score 1") {
        const std::vector<std::int32_t> labels = {0, 1, 1, 0};
        DenseMatrix logits(4, 2);
        for (std::size_t v = 0; v < 4; ++v) logits(v, static_cast<std::size_t>(labels[v])) = 1.0;
        CHECK(accuracy(logits, labels, {0, 1, 2, 3}) == 1.0);
    }
    SUBCASE("all-zero logits tie toward class 0") {
        const std::vector<std::int32_t> labels = {1, 1, 1};
        CHECK(accuracy(DenseMatrix(3, 2), labels, {0, 1, 2}) == 0.0);
    }
    SUBCASE("matches a per-node loop oracle") {
        Rng rng(1);
        const DenseMatrix logits = testutil::random_matrix(30, 4, rng);
        std::vector<std::int32_t> labels(30);
        for (auto& l : labels) l = static_cast<std::int32_t>(rng.integer(4));
        std::vector<std::uint32_t> mask;
        for (std::uint32_t v = 0; v < 30; v += 2) mask.push_back(v);
        std::size_t correct = 0;
        for (std::uint32_t v : mask) {
            std::size_t best = 0;
            for (std::size_t j = 1; j < 4; ++j)
                if (logits(v, j) > logits(v, best)) best = j;
            if (static_cast<std::int32_t>(best) == labels[v]) ++correct;
        }
        CHECK(accuracy(logits, labels, mask) ==
              static_cast<double>(correct) / static_cast<double>(mask.size()));
    }
    SUBCASE("empty mask rejected") {
        CHECK_THROWS_AS(accuracy(DenseMatrix(3, 2), {0, 0, 0}, {}), ParameterError);
    }
}

TEST_CASE("roc_auc") {
    SUBCASE("perfect separation") {
        CHECK(roc_auc({0.9, 0.8, 0.2, 0.1}, {1, 1, 0, 0}) == 1.0);
    }
    SUBCASE("all ties give 0.5") {
        CHECK(roc_auc({0.4, 0.4, 0.4, 0.4}, {1, 0, 1, 0}) == 0.5);
    }
    SUBCASE("hand-computed six-point case") {
        // pos {.9, .6}, neg {.8, .3, .3, .1}: 7 wins of 8 pairs = 0.875
        CHECK(roc_auc({0.9, 0.6, 0.8, 0.3, 0.3, 0.1}, {1, 1, 0, 0, 0, 0}) ==
              doctest::Approx(0.875).epsilon(1e-12));
    }
    SUBCASE("single-class input rejected") {
        CHECK_THROWS_AS(roc_auc({0.5, 0.6}, {1, 1}), ParameterError);
    }
    SUBCASE("invariant under strictly monotone transforms") {
        Rng rng(2);
        std::vector<double> scores;
        std::vector<int> labels;
        for (int i = 0; i < 40; ++i) {
            scores.push_back(rng.uniform());
            labels.push_back(rng.uniform() < 0.4 ? 1 : 0);
        }
        const double base = roc_auc(scores, labels);
        std::vector<double> warped = scores;
        for (double& s : warped) s = std::exp(3.0 * s) - 7.0;
        CHECK(roc_auc(warped, labels) == doctest::Approx(base).epsilon(1e-15));
    }
}

namespace {

std::pair<GnnModel, TaskSpec> trained_nc(const Graph& g, const std::string& id,
                                         std::uint64_t seed) {
    std::vector<std::uint32_t> nodes;
    std::int32_t maxl = -1;
    for (std::size_t v = 0; v < g.num_nodes; ++v)
        if (g.labels[v] >= 0) {
            nodes.push_back(static_cast<std::uint32_t>(v));
            maxl = std::max(maxl, g.labels[v]);
        }
    Rng rng(seed);
    shuffle(nodes, rng);
    TaskSpec task;
    task.kind = TaskKind::NodeClassification;
    task.task_id = id;
    task.num_classes = static_cast<std::size_t>(maxl) + 1;
    task.node_split.num_classes = task.num_classes;
    task.node_split.train.assign(nodes.begin(), nodes.begin() + nodes.size() / 2);
    task.node_split.test.assign(nodes.begin() + nodes.size() / 2, nodes.end());

    TrainConfig c;
    c.arch = Arch::Gcn;
    c.num_layers = 2;
    c.hidden_dim = 8;
    c.epochs = 80;
    c.seed = seed;
    c.task = task;
    return {train(g, c), task};
}

} // namespace

TEST_CASE("evaluate_merged") {
    const Graph g = generate_sbm(2, 25, 0.3, 0.03, 6, 0.5, 3);
    auto [model, task] = trained_nc(g, "solo", 3);

    SUBCASE("evaluating the base model matches the direct metric") {
        const EvalReport report = evaluate_merged(model, {{task, g}});
        REQUIRE(report.rows.size() == 1);
        const ForwardResult fwd = forward(model, g, false);
        const DenseMatrix logits = head_forward(fwd.embeddings, model.heads.at("solo"));
        CHECK(report.rows[0].value == accuracy(logits, g.labels, task.node_split.test));
        CHECK(report.rows[0].metric == "accuracy");
        CHECK(report.rows[0].value >= 0.0);
        CHECK(report.rows[0].value <= 1.0);
    }
    SUBCASE("two tasks over a shared graph give two rows") {
        auto [model2, task2] = trained_nc(g, "other", 4);
        GnnModel both = model;
        both.heads.emplace("other", model2.heads.at("other"));
        const EvalReport report = evaluate_merged(both, {{task, g}, {task2, g}});
        CHECK(report.rows.size() == 2);
    }
    SUBCASE("missing head is a configuration error") {
        TaskSpec ghost = task;
        ghost.task_id = "ghost";
        CHECK_THROWS_AS(evaluate_merged(model, {{ghost, g}}), ConfigurationError);
    }
}

TEST_CASE("link prediction evaluation") {
    const Graph g = generate_sbm(2, 30, 0.4, 0.05, 6, 0.5, 5);
    TaskSpec task;
    task.kind = TaskKind::LinkPrediction;
    task.task_id = "lp";
    task.edge_split = link_split(g, 5);

    TrainConfig c;
    c.arch = Arch::Gcn;
    c.num_layers = 2;
    c.hidden_dim = 8;
    c.epochs = 120;
    c.seed = 5;
    c.task = task;
    const GnnModel model = train(g, c);
    const EvalRow row = evaluate_task(model, task, g);
    CHECK(row.metric == "roc_auc");
    CHECK(row.value >= 0.0);
    CHECK(row.value <= 1.0);
    // A trained model should beat coin-flipping on a strongly block-structured graph.
    CHECK(row.value > 0.6);
}

TEST_CASE("export_embeddings") {
    const Graph g = generate_sbm(2, 10, 0.3, 0.05, 4, 0.5, 6);
    const std::string path = "/tmp/gnnmerge_test_emb.csv";

    SUBCASE("0-layer model reproduces the features") {
        GnnModel empty;
        export_embeddings(empty, g, path);
        std::ifstream in(path);
        std::string header;
        std::getline(in, header);
        CHECK(header == "node_id,dim_0,dim_1,dim_2,dim_3");
        std::string line;
        std::size_t rows = 0;
        while (std::getline(in, line)) {
            if (rows == 0) {
                char expect[256];
                std::snprintf(expect, sizeof(expect), "0,%.9g,%.9g,%.9g,%.9g",
                              g.features(0, 0), g.features(0, 1), g.features(0, 2),
                              g.features(0, 3));
                CHECK(line == expect);
            }
            ++rows;
        }
        CHECK(rows == g.num_nodes);
    }
    SUBCASE("re-export is byte-identical") {
        auto [model, task] = trained_nc(g, "t", 7);
        export_embeddings(model, g, path);
        std::ifstream a(path, std::ios::binary);
        const std::string bytes_a{std::istreambuf_iterator<char>(a), {}};
        export_embeddings(model, g, path);
        std::ifstream b(path, std::ios::binary);
        const std::string bytes_b{std::istreambuf_iterator<char>(b), {}};
        CHECK(bytes_a == bytes_b);
    }
}

TEST_CASE("report formatting") {
    EvalReport report;
    report.rows.push_back({"taskA", "accuracy", 0.9875, "test"});
    report.rows.push_back({"lp", "roc_auc", 0.75, "test"});
    const std::string text = format_report(report);
    CHECK(text.find("taskA") != std::string::npos);
    CHECK(text.find("roc_auc") != std::string::npos);

    write_report_csv(report, "/tmp/gnnmerge_test_report.csv");
    std::ifstream in("/tmp/gnnmerge_test_report.csv");
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    CHECK(header == "task_id,metric,value,split");
    CHECK(row == "taskA,accuracy,0.9875,test");
}
