#include <doctest.h>

#include <cmath>
#include <limits>

#include "gnnmerge/errors.hpp"
#include "gnnmerge/splits.hpp"
#include "gnnmerge/synth.hpp"
#include "gnnmerge/trainer.hpp"
#include "test_util.hpp"

using namespace gnnmerge;

namespace {

// Node-classification task over all labeled nodes of an SBM graph.
TaskSpec nc_task(const Graph& g, std::uint64_t seed) {
    std::vector<std::uint32_t> nodes;
    std::int32_t max_label = -1;
    for (std::size_t v = 0; v < g.num_nodes; ++v) {
        if (g.labels[v] >= 0) {
            nodes.push_back(static_cast<std::uint32_t>(v));
            max_label = std::max(max_label, g.labels[v]);
        }
    }
    Rng rng(seed);
    shuffle(nodes, rng);
    TaskSpec task;
    task.kind = TaskKind::NodeClassification;
    task.num_classes = static_cast<std::size_t>(max_label) + 1;
    task.node_split.num_classes = task.num_classes;
    const std::size_t n_train = nodes.size() * 6 / 10;
    const std::size_t n_val = nodes.size() * 2 / 10;
    task.node_split.train.assign(nodes.begin(), nodes.begin() + n_train);
    task.node_split.val.assign(nodes.begin() + n_train, nodes.begin() + n_train + n_val);
    task.node_split.test.assign(nodes.begin() + n_train + n_val, nodes.end());
    return task;
}

TaskSpec lp_task(const Graph& g, std::uint64_t seed) {
    TaskSpec task;
    task.kind = TaskKind::LinkPrediction;
    task.edge_split = link_split(g, seed);
    return task;
}

TrainConfig small_config(Arch arch, const TaskSpec& task, std::size_t hidden = 8,
                         std::size_t layers = 2) {
    TrainConfig c;
    c.arch = arch;
    c.num_layers = layers;
    c.hidden_dim = hidden;
    c.epochs = 50;
    c.seed = 3;
    c.task = task;
    return c;
}

bool models_bit_equal(const GnnModel& a, const GnnModel& b) {
    if (a.layers.size() != b.layers.size()) return false;
    for (std::size_t l = 0; l < a.layers.size(); ++l) {
        for (std::size_t k = 0; k < a.layers[l].weights.size(); ++k)
            if (!bits_equal(a.layers[l].weights[k], b.layers[l].weights[k])) return false;
        if (a.layers[l].gat_attention &&
            !bits_equal(*a.layers[l].gat_attention, *b.layers[l].gat_attention))
            return false;
    }
    for (const auto& [t, h] : a.heads)
        if (!b.heads.count(t) || !bits_equal(h, b.heads.at(t))) return false;
    return true;
}

} // namespace

TEST_CASE("loss at zero weights is ln(num_classes)") {
    const Graph g = generate_sbm(2, 20, 0.3, 0.05, 4, 0.5, 1);
    const TaskSpec task = nc_task(g, 1);
    TrainConfig c = small_config(Arch::Gcn, task);
    GnnModel m = init_model(g, c);
    for (auto& layer : m.layers)
        for (auto& w : layer.weights)
            for (double& v : w.values()) v = 0.0;
    for (auto& [t, h] : m.heads)
        for (double& v : h.values()) v = 0.0;
    const LossResult r = loss_and_grad(m, g, task);
    CHECK(r.loss == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("loss at a perfect-logit model is tiny") {
    // Noise-free SBM: features are exactly the one-hot block means, so a
    // 0-layer model with a 20x identity head produces one-hot logits x 20.
    const Graph g = generate_sbm(2, 20, 0.3, 0.05, 4, 0.0, 2);
    const TaskSpec task = nc_task(g, 2);
    GnnModel m;
    DenseMatrix head(4, 2);
    head(0, 0) = 20.0;
    head(1, 1) = 20.0;
    m.heads.emplace(task.task_id, std::move(head));
    const LossResult r = loss_and_grad(m, g, task);
    CHECK(r.loss <= 0.01);
}

TEST_CASE("analytic gradients match central finite differences") {
    const Graph g = generate_sbm(2, 12, 0.3, 0.1, 4, 0.8, 3);
    SUBCASE("node classification, all architectures") {
        const TaskSpec task = nc_task(g, 3);
        for (Arch arch : {Arch::Gcn, Arch::Sage, Arch::Gin, Arch::Gat}) {
            TrainConfig c = small_config(arch, task);
            const GnnModel m = init_model(g, c);
            const double err = grad_check(m, g, task, 50, 7);
            INFO("arch ", arch_name(arch));
            CHECK(err <= 1e-4);
        }
    }
    SUBCASE("link prediction, all architectures") {
        const TaskSpec task = lp_task(g, 4);
        for (Arch arch : {Arch::Gcn, Arch::Sage, Arch::Gin, Arch::Gat}) {
            TrainConfig c = small_config(arch, task);
            const GnnModel m = init_model(g, c);
            const double err = grad_check(m, g, task, 50, 8);
            INFO("arch ", arch_name(arch));
            CHECK(err <= 1e-4);
        }
    }
    SUBCASE("identity-activation linear model is near-exact") {
        const TaskSpec task = nc_task(g, 5);
        TrainConfig c = small_config(Arch::Gcn, task, 8, 1); // single layer => identity
        const GnnModel m = init_model(g, c);
        CHECK(grad_check(m, g, task, 40, 9) <= 1e-7);
    }
}

TEST_CASE("gradients cover every tensor and flag NaN inputs") {
    const Graph g = generate_sbm(2, 10, 0.3, 0.1, 4, 0.5, 6);
    const TaskSpec task = nc_task(g, 6);
    TrainConfig c = small_config(Arch::Gat, task);
    const GnnModel m = init_model(g, c);
    const LossResult r = loss_and_grad(m, g, task);
    CHECK(std::isfinite(r.loss));
    REQUIRE(r.grads.layer_weights.size() == 2);
    CHECK(r.grads.gat_attention[0].has_value());
    CHECK(r.grads.heads.count(task.task_id) == 1);

    // NaN must reach the loss: a 1-layer model has no inner ReLU to mask it.
    TrainConfig c1 = small_config(Arch::Gcn, task, 8, 1);
    const GnnModel m1 = init_model(g, c1);
    Graph bad = g;
    bad.features(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_WITH_AS((void)loss_and_grad(m1, bad, task),
                         doctest::Contains("input features"), NumericError);
}

TEST_CASE("training reaches high accuracy on a separable SBM") {
    const Graph g = generate_sbm(2, 50, 0.3, 0.02, 8, 0.5, 7);
    const TaskSpec task = nc_task(g, 7);
    TrainConfig c = small_config(Arch::Gcn, task, 16);
    c.epochs = 200;
    const GnnModel m = train(g, c);
    const ForwardResult fwd = forward(m, g, false);
    const DenseMatrix logits = head_forward(fwd.embeddings, m.heads.at(task.task_id));
    std::size_t correct = 0;
    for (std::uint32_t v : task.node_split.train) {
        const std::size_t pred = logits(v, 0) >= logits(v, 1) ? 0 : 1;
        if (static_cast<std::int32_t>(pred) == g.labels[v]) ++correct;
    }
    const double acc = static_cast<double>(correct) /
                       static_cast<double>(task.node_split.train.size());
    CHECK(acc >= 0.95);
}

TEST_CASE("epochs = 0 returns the initialized model unchanged") {
    const Graph g = generate_sbm(2, 10, 0.3, 0.1, 4, 0.5, 8);
    TrainConfig c = small_config(Arch::Gcn, nc_task(g, 8));
    c.epochs = 0;
    CHECK(models_bit_equal(train(g, c), init_model(g, c)));
}

TEST_CASE("training is deterministic per seed") {
    const Graph g = generate_sbm(2, 15, 0.3, 0.1, 4, 0.5, 9);
    TrainConfig c = small_config(Arch::Sage, nc_task(g, 9));
    c.epochs = 20;
    CHECK(models_bit_equal(train(g, c), train(g, c)));
}

TEST_CASE("learning rate 0 leaves weights unchanged") {
    const Graph g = generate_sbm(2, 10, 0.3, 0.1, 4, 0.5, 10);
    TrainConfig c = small_config(Arch::Gin, nc_task(g, 10));
    c.learning_rate = 0.0;
    c.epochs = 5;
    CHECK(models_bit_equal(train(g, c), init_model(g, c)));
}

TEST_CASE("training loss decreases from the initial loss") {
    const Graph g = generate_sbm(2, 20, 0.3, 0.05, 4, 0.5, 11);
    const TaskSpec task = nc_task(g, 11);
    TrainConfig c = small_config(Arch::Gcn, task, 8);
    c.epochs = 30;
    const GnnModel m0 = init_model(g, c);
    const GnnModel m = train(g, c);
    CHECK(loss_only(m, g, task) <= loss_only(m0, g, task));
}

TEST_CASE("link prediction training improves the loss") {
    const Graph g = generate_sbm(2, 25, 0.4, 0.05, 4, 0.5, 12);
    const TaskSpec task = lp_task(g, 12);
    TrainConfig c = small_config(Arch::Gcn, task, 8);
    c.epochs = 60;
    const GnnModel m0 = init_model(g, c);
    const GnnModel m = train(g, c);
    CHECK(loss_only(m, g, task) < loss_only(m0, g, task));
}

TEST_CASE("configuration errors") {
    const Graph g = generate_sbm(2, 10, 0.3, 0.1, 4, 0.5, 13);
    TrainConfig c = small_config(Arch::Sage, nc_task(g, 13), 7); // odd hidden
    CHECK_THROWS_AS(init_model(g, c), ConfigurationError);

    TrainConfig c2 = small_config(Arch::Gcn, nc_task(g, 13));
    c2.task.num_classes = 1;
    CHECK_THROWS_AS(init_model(g, c2), ConfigurationError);
}
