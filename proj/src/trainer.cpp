#include "gnnmerge/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "gnnmerge/errors.hpp"
#include "gnnmerge/rng.hpp"

namespace gnnmerge {

namespace {

constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

// ReLU subgradient at 0 is 0; LeakyReLU keeps the negative-branch slope at 0
// (finite-difference comparisons exclude kink neighborhoods).
double relu_grad(double pre) { return pre > 0.0 ? 1.0 : 0.0; }
double leaky_relu_grad(double pre) { return pre > 0.0 ? 1.0 : kLeakyReluSlope; }

DenseMatrix activation_backward(const DenseMatrix& dh, const DenseMatrix& pre,
                                Activation act) {
    if (act == Activation::Identity) return dh;
    DenseMatrix out = dh;
    for (std::size_t i = 0; i < out.size(); ++i)
        out.values()[i] *= relu_grad(pre.values()[i]);
    return out;
}

// Symmetric GCN propagation D^{-1/2}(A + I)D^{-1/2} X; its own transpose, so
// it serves forward aggregation and backward alike.
DenseMatrix gcn_propagate(const Graph& graph, const DenseMatrix& x) {
    const std::vector<std::uint64_t> deg = degrees_with_self_loop(graph);
    DenseMatrix out(x.rows(), x.cols());
    for (std::size_t v = 0; v < graph.num_nodes; ++v) {
        const double dv = std::sqrt(static_cast<double>(deg[v]));
        double* orow = out.row(v);
        for (std::uint32_t u : graph.neighbors(v)) {
            const double c = 1.0 / (std::sqrt(static_cast<double>(deg[u])) * dv);
            const double* xrow = x.row(u);
            for (std::size_t j = 0; j < x.cols(); ++j) orow[j] += c * xrow[j];
        }
        const double* xrow = x.row(v);
        const double cself = 1.0 / (dv * dv);
        for (std::size_t j = 0; j < x.cols(); ++j) orow[j] += cself * xrow[j];
    }
    return out;
}

// Transpose of the row-normalized mean aggregation: out[u] += y[v] / |N_v|.
DenseMatrix mean_aggregate_transpose(const Graph& graph, const DenseMatrix& y) {
    DenseMatrix out(y.rows(), y.cols());
    for (std::size_t v = 0; v < graph.num_nodes; ++v) {
        auto nbrs = graph.neighbors(v);
        if (nbrs.empty()) continue;
        const double inv = 1.0 / static_cast<double>(nbrs.size());
        const double* yrow = y.row(v);
        for (std::uint32_t u : nbrs) {
            double* orow = out.row(u);
            for (std::size_t j = 0; j < y.cols(); ++j) orow[j] += inv * yrow[j];
        }
    }
    return out;
}

// Transpose of (I + A) sum aggregation.
DenseMatrix sum_aggregate_transpose(const Graph& graph, const DenseMatrix& y) {
    DenseMatrix out = y;
    for (std::size_t v = 0; v < graph.num_nodes; ++v) {
        const double* yrow = y.row(v);
        for (std::uint32_t u : graph.neighbors(v)) {
            double* orow = out.row(u);
            for (std::size_t j = 0; j < y.cols(); ++j) orow[j] += yrow[j];
        }
    }
    return out;
}

} // namespace

LayerGrads layer_backward(const LayerSpec& spec, const Graph& graph,
                          const DenseMatrix& h_prev, const LayerResult& fwd,
                          const DenseMatrix& dh, DenseMatrix& dh_prev_out) {
    LayerGrads grads;
    switch (spec.arch) {
        case Arch::Gcn: {
            const DenseMatrix dpre = activation_backward(dh, fwd.g[0], spec.activation);
            grads.weights.push_back(
                cross_accumulate(DenseMatrix(spec.in_dim, spec.out_dim), fwd.z[0], dpre));
            const DenseMatrix dz = matmul(dpre, transpose(spec.weights[0]));
            dh_prev_out = gcn_propagate(graph, dz);
            break;
        }
        case Arch::Sage: {
            const std::size_t half = spec.out_dim / 2;
            // Reconstruct the concatenated pre-activation from the halves.
            DenseMatrix dp1(dh.rows(), half), dp2(dh.rows(), half);
            for (std::size_t v = 0; v < dh.rows(); ++v) {
                for (std::size_t j = 0; j < half; ++j) {
                    double g1 = dh(v, j), g2 = dh(v, half + j);
                    if (spec.activation == Activation::Relu) {
                        g1 *= relu_grad(fwd.g[0](v, j));
                        g2 *= relu_grad(fwd.g[1](v, j));
                    }
                    dp1(v, j) = g1;
                    dp2(v, j) = g2;
                }
            }
            grads.weights.push_back(
                cross_accumulate(DenseMatrix(spec.in_dim, half), fwd.z[0], dp1));
            grads.weights.push_back(
                cross_accumulate(DenseMatrix(spec.in_dim, half), fwd.z[1], dp2));
            dh_prev_out = matmul(dp1, transpose(spec.weights[0]));
            const DenseMatrix dk = matmul(dp2, transpose(spec.weights[1]));
            axpy(dh_prev_out, 1.0, mean_aggregate_transpose(graph, dk));
            break;
        }
        case Arch::Gin: {
            const std::size_t n_mats = spec.weights.size();
            DenseMatrix dg = activation_backward(dh, fwd.g[n_mats - 1], spec.activation);
            grads.weights.resize(n_mats);
            for (std::size_t k = n_mats; k-- > 0;) {
                grads.weights[k] = cross_accumulate(
                    DenseMatrix(spec.weights[k].rows(), spec.weights[k].cols()), fwd.z[k], dg);
                DenseMatrix dz = matmul(dg, transpose(spec.weights[k]));
                if (k > 0) {
                    dg = activation_backward(dz, fwd.g[k - 1], Activation::Relu);
                } else {
                    dh_prev_out = sum_aggregate_transpose(graph, dz);
                }
            }
            break;
        }
        case Arch::Gat: {
            const std::size_t n = graph.num_nodes;
            const std::size_t out = spec.out_dim;
            const std::size_t in = spec.in_dim;
            const DenseMatrix& w = spec.weights[0];
            const DenseMatrix& a = *spec.gat_attention;

            const DenseMatrix dpre = activation_backward(dh, fwd.g[0], spec.activation);
            DenseMatrix dw =
                cross_accumulate(DenseMatrix(in, out), fwd.z[0], dpre);
            const DenseMatrix dz_node = matmul(dpre, transpose(w));

            DenseMatrix dq(n, out);
            DenseMatrix da(2 * out, 1);
            dh_prev_out = DenseMatrix(n, in);

            const auto pairs = gat_attended_pairs(graph);
            const DenseMatrix& logits = fwd.g[1];
            std::size_t p = 0;
            std::vector<double> dalpha;
            for (std::size_t v = 0; v < n; ++v) {
                const std::size_t count = graph.degree(v) + 1;
                dalpha.assign(count, 0.0);
                const double* dzrow = dz_node.row(v);
                double weighted = 0.0;
                for (std::size_t i = 0; i < count; ++i) {
                    const std::uint32_t u = pairs[p + i].second;
                    const double* hrow = h_prev.row(u);
                    double dot = 0.0;
                    for (std::size_t j = 0; j < in; ++j) dot += hrow[j] * dzrow[j];
                    dalpha[i] = dot;
                    weighted += fwd.gat_alpha[p + i] * dot;
                    double* drow = dh_prev_out.row(u);
                    const double alpha = fwd.gat_alpha[p + i];
                    for (std::size_t j = 0; j < in; ++j) drow[j] += alpha * dzrow[j];
                }
                for (std::size_t i = 0; i < count; ++i) {
                    const std::uint32_t u = pairs[p + i].second;
                    const double de = fwd.gat_alpha[p + i] * (dalpha[i] - weighted);
                    const double ds = de * leaky_relu_grad(logits(p + i, 0));
                    const double* qv = fwd.gat_q.row(v);
                    const double* qu = fwd.gat_q.row(u);
                    double* dqv = dq.row(v);
                    double* dqu = dq.row(u);
                    for (std::size_t j = 0; j < out; ++j) {
                        da(j, 0) += ds * qv[j];
                        da(out + j, 0) += ds * qu[j];
                        dqv[j] += ds * a(j, 0);
                        dqu[j] += ds * a(out + j, 0);
                    }
                }
                p += count;
            }
            axpy(dw, 1.0, cross_accumulate(DenseMatrix(in, out), h_prev, dq));
            axpy(dh_prev_out, 1.0, matmul(dq, transpose(w)));
            grads.weights.push_back(std::move(dw));
            grads.gat_attention = std::move(da);
            break;
        }
    }
    return grads;
}

ModelGrads zero_grads_like(const GnnModel& model) {
    ModelGrads g;
    for (const auto& layer : model.layers) {
        std::vector<DenseMatrix> ws;
        for (const auto& w : layer.weights) ws.emplace_back(w.rows(), w.cols());
        g.layer_weights.push_back(std::move(ws));
        if (layer.gat_attention) {
            g.gat_attention.emplace_back(
                DenseMatrix(layer.gat_attention->rows(), layer.gat_attention->cols()));
        } else {
            g.gat_attention.emplace_back(std::nullopt);
        }
    }
    for (const auto& [task, head] : model.heads)
        g.heads.emplace(task, DenseMatrix(head.rows(), head.cols()));
    return g;
}

namespace {

void validate_task(const GnnModel& model, const Graph& graph, const TaskSpec& task) {
    auto it = model.heads.find(task.task_id);
    if (it == model.heads.end()) {
        throw ConfigurationError("model has no head for task '" + task.task_id + "'");
    }
    if (task.kind == TaskKind::NodeClassification) {
        if (task.node_split.train.empty()) {
            throw ConfigurationError("node task '" + task.task_id + "' has an empty train set");
        }
        if (!graph.has_labels()) {
            throw ConfigurationError("node task '" + task.task_id +
                                     "' requires labels on the graph");
        }
        if (it->second.cols() < 2) {
            throw ConfigurationError("node task head must have >= 2 classes");
        }
        for (std::uint32_t v : task.node_split.train) {
            if (v >= graph.num_nodes) {
                throw ConfigurationError("train node " + std::to_string(v) + " out of range");
            }
            const std::int32_t l = graph.labels[v];
            if (l < 0 || static_cast<std::size_t>(l) >= it->second.cols()) {
                throw ConfigurationError("train node " + std::to_string(v) + " has label " +
                                         std::to_string(l) + " outside head range");
            }
        }
    } else {
        if (task.edge_split.train.pos.empty()) {
            throw ConfigurationError("link task '" + task.task_id + "' has no train edges");
        }
    }
}

struct HeadLoss {
    double loss = 0.0;
    DenseMatrix dembeddings;
    DenseMatrix dhead;
};

// Mean softmax cross-entropy over train nodes.
HeadLoss node_classification_loss(const DenseMatrix& embeddings, const DenseMatrix& head,
                                  const Graph& graph, const NodeSplit& split) {
    const DenseMatrix logits = head_forward(embeddings, head);
    const std::size_t c = head.cols();
    const double inv = 1.0 / static_cast<double>(split.train.size());

    HeadLoss out;
    DenseMatrix dlogits(logits.rows(), c);
    for (std::uint32_t v : split.train) {
        const double* row = logits.row(v);
        double maxv = row[0];
        for (std::size_t j = 1; j < c; ++j) maxv = std::max(maxv, row[j]);
        double denom = 0.0;
        for (std::size_t j = 0; j < c; ++j) denom += std::exp(row[j] - maxv);
        const auto y = static_cast<std::size_t>(graph.labels[v]);
        out.loss += inv * (std::log(denom) - (row[y] - maxv));
        double* drow = dlogits.row(v);
        for (std::size_t j = 0; j < c; ++j) {
            const double p = std::exp(row[j] - maxv) / denom;
            drow[j] = inv * (p - (j == y ? 1.0 : 0.0));
        }
    }
    out.dhead = cross_accumulate(DenseMatrix(head.rows(), c), embeddings, dlogits);
    out.dembeddings = matmul(dlogits, transpose(head));
    return out;
}

// Mean binary cross-entropy over train positives + negatives through the
// dot-product decoder on head-projected embeddings.
HeadLoss link_prediction_loss(const DenseMatrix& embeddings, const DenseMatrix& head,
                              const EdgeSplit& split) {
    const DenseMatrix proj = head_forward(embeddings, head);
    std::vector<std::pair<EdgePair, double>> samples;
    for (const auto& e : split.train.pos) samples.emplace_back(e, 1.0);
    for (const auto& e : split.train.neg) samples.emplace_back(e, 0.0);
    const double inv = 1.0 / static_cast<double>(samples.size());

    HeadLoss out;
    DenseMatrix dproj(proj.rows(), proj.cols());
    for (const auto& [pair, y] : samples) {
        const auto [u, v] = pair;
        const double* pu = proj.row(u);
        const double* pv = proj.row(v);
        double s = 0.0;
        for (std::size_t j = 0; j < proj.cols(); ++j) s += pu[j] * pv[j];
        // Stable log(1 + exp(±s)) forms of -log sigma / -log(1 - sigma).
        const double softplus_neg = s > 0.0 ? std::log1p(std::exp(-s)) : -s + std::log1p(std::exp(s));
        const double softplus_pos = s > 0.0 ? s + std::log1p(std::exp(-s)) : std::log1p(std::exp(s));
        out.loss += inv * (y > 0.5 ? softplus_neg : softplus_pos);
        const double sigma = 1.0 / (1.0 + std::exp(-s));
        const double ds = inv * (sigma - y);
        double* du = dproj.row(u);
        double* dv = dproj.row(v);
        for (std::size_t j = 0; j < proj.cols(); ++j) {
            du[j] += ds * pv[j];
            dv[j] += ds * pu[j];
        }
    }
    out.dhead = cross_accumulate(DenseMatrix(head.rows(), head.cols()), embeddings, dproj);
    out.dembeddings = matmul(dproj, transpose(head));
    return out;
}

std::string first_nonfinite_tensor(const ActivationTrace& trace) {
    if (!all_finite(trace.h0)) return "input features";
    for (std::size_t l = 0; l < trace.layers.size(); ++l) {
        const auto& lr = trace.layers[l];
        for (std::size_t k = 0; k < lr.z.size(); ++k) {
            if (!all_finite(lr.z[k]))
                return "layer " + std::to_string(l) + " z[" + std::to_string(k) + "]";
            if (!all_finite(lr.g[k]))
                return "layer " + std::to_string(l) + " g[" + std::to_string(k) + "]";
        }
        if (!all_finite(lr.h)) return "layer " + std::to_string(l) + " output";
    }
    return "task head output";
}

} // namespace

LossResult loss_and_grad(const GnnModel& model, const Graph& graph, const TaskSpec& task) {
    validate_task(model, graph, task);
    ForwardResult fwd = forward(model, graph, /*capture=*/true);

    const DenseMatrix& head = model.heads.at(task.task_id);
    HeadLoss hl = task.kind == TaskKind::NodeClassification
                      ? node_classification_loss(fwd.embeddings, head, graph, task.node_split)
                      : link_prediction_loss(fwd.embeddings, head, task.edge_split);
    if (!std::isfinite(hl.loss)) {
        throw NumericError("loss is not finite; non-finite values first appear in " +
                           first_nonfinite_tensor(fwd.trace));
    }

    LossResult out;
    out.loss = hl.loss;
    out.min_abs_attention_logit = fwd.min_abs_attention_logit;
    out.grads = zero_grads_like(model);
    out.grads.heads.at(task.task_id) = std::move(hl.dhead);

    DenseMatrix dh = std::move(hl.dembeddings);
    for (std::size_t l = model.layers.size(); l-- > 0;) {
        DenseMatrix dh_prev;
        LayerGrads lg = layer_backward(model.layers[l], graph, fwd.trace.layer_input(l),
                                       fwd.trace.layers[l], dh, dh_prev);
        out.grads.layer_weights[l] = std::move(lg.weights);
        if (lg.gat_attention) out.grads.gat_attention[l] = std::move(*lg.gat_attention);
        dh = std::move(dh_prev);
    }
    return out;
}

double loss_only(const GnnModel& model, const Graph& graph, const TaskSpec& task,
                 double* min_abs_attention_logit) {
    validate_task(model, graph, task);
    ForwardResult fwd = forward(model, graph, /*capture=*/false);
    if (min_abs_attention_logit) *min_abs_attention_logit = fwd.min_abs_attention_logit;
    const DenseMatrix& head = model.heads.at(task.task_id);
    if (task.kind == TaskKind::NodeClassification) {
        return node_classification_loss(fwd.embeddings, head, graph, task.node_split).loss;
    }
    return link_prediction_loss(fwd.embeddings, head, task.edge_split).loss;
}

GnnModel init_model(const Graph& graph, const TrainConfig& config) {
    if (config.num_layers == 0) throw ConfigurationError("num_layers must be >= 1");
    if (config.hidden_dim == 0) throw ConfigurationError("hidden_dim must be >= 1");
    if (!(config.learning_rate >= 0.0)) {
        throw ConfigurationError("learning_rate must be nonnegative");
    }
    if (config.arch == Arch::Sage && config.hidden_dim % 2 != 0) {
        throw ConfigurationError("sage needs an even hidden_dim");
    }
    if (config.task.kind == TaskKind::NodeClassification && config.task.num_classes < 2) {
        throw ConfigurationError("node classification needs num_classes >= 2");
    }

    Rng rng(config.seed);
    auto glorot = [&rng](std::size_t rows, std::size_t cols) {
        DenseMatrix m(rows, cols);
        const double s = std::sqrt(6.0 / static_cast<double>(rows + cols));
        for (double& v : m.values()) v = rng.uniform(-s, s);
        return m;
    };

    GnnModel model;
    std::size_t in = graph.feature_dim();
    for (std::size_t l = 0; l < config.num_layers; ++l) {
        LayerSpec spec;
        spec.arch = config.arch;
        spec.in_dim = in;
        spec.out_dim = config.hidden_dim;
        spec.activation =
            (l + 1 == config.num_layers) ? Activation::Identity : Activation::Relu;
        switch (config.arch) {
            case Arch::Gcn:
                spec.weights.push_back(glorot(in, spec.out_dim));
                break;
            case Arch::Sage:
                spec.weights.push_back(glorot(in, spec.out_dim / 2));
                spec.weights.push_back(glorot(in, spec.out_dim / 2));
                break;
            case Arch::Gin:
                spec.weights.push_back(glorot(in, config.hidden_dim));
                spec.weights.push_back(glorot(config.hidden_dim, spec.out_dim));
                break;
            case Arch::Gat:
                spec.weights.push_back(glorot(in, spec.out_dim));
                spec.gat_attention = glorot(2 * spec.out_dim, 1);
                break;
        }
        in = spec.out_dim;
        model.layers.push_back(std::move(spec));
    }
    const std::size_t head_out = config.task.kind == TaskKind::NodeClassification
                                     ? config.task.num_classes
                                     : config.hidden_dim;
    model.heads.emplace(config.task.task_id, glorot(config.hidden_dim, head_out));

    model.metadata["arch"] = arch_name(config.arch);
    model.metadata["hidden"] = std::to_string(config.hidden_dim);
    model.metadata["seed"] = std::to_string(config.seed);
    validate_model(model);
    return model;
}

AdamOptimizer::AdamOptimizer(const GnnModel& model, double learning_rate)
    : lr_(learning_rate), m_(zero_grads_like(model)), v_(zero_grads_like(model)) {}

namespace {

void adam_update(DenseMatrix& w, const DenseMatrix& g, DenseMatrix& m, DenseMatrix& v,
                 double lr, double bc1, double bc2) {
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double gi = g.values()[i];
        double& mi = m.values()[i];
        double& vi = v.values()[i];
        mi = kAdamBeta1 * mi + (1.0 - kAdamBeta1) * gi;
        vi = kAdamBeta2 * vi + (1.0 - kAdamBeta2) * gi * gi;
        w.values()[i] -= lr * (mi / bc1) / (std::sqrt(vi / bc2) + kAdamEps);
    }
}

} // namespace

void AdamOptimizer::step(GnnModel& model, const ModelGrads& grads) {
    ++t_;
    const double bc1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(t_));
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        auto& layer = model.layers[l];
        for (std::size_t k = 0; k < layer.weights.size(); ++k) {
            adam_update(layer.weights[k], grads.layer_weights[l][k], m_.layer_weights[l][k],
                        v_.layer_weights[l][k], lr_, bc1, bc2);
        }
        if (layer.gat_attention) {
            adam_update(*layer.gat_attention, *grads.gat_attention[l], *m_.gat_attention[l],
                        *v_.gat_attention[l], lr_, bc1, bc2);
        }
    }
    for (auto& [task, head] : model.heads) {
        adam_update(head, grads.heads.at(task), m_.heads.at(task), v_.heads.at(task), lr_,
                    bc1, bc2);
    }
}

GnnModel train(const Graph& graph, const TrainConfig& config, std::ostream* log) {
    GnnModel model = init_model(graph, config);
    AdamOptimizer opt(model, config.learning_rate);
    double final_loss = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        LossResult lr = loss_and_grad(model, graph, config.task);
        opt.step(model, lr.grads);
        final_loss = lr.loss;
        if (log) (*log) << "epoch " << epoch + 1 << "/" << config.epochs
                        << " loss=" << lr.loss << "\n";
    }
    if (config.epochs > 0) model.metadata["train.final_loss"] = std::to_string(final_loss);
    model.metadata["train.epochs"] = std::to_string(config.epochs);
    return model;
}

namespace {

struct CoordRef {
    DenseMatrix* tensor;
    const DenseMatrix* grad;
    std::size_t offset;
};

std::vector<std::pair<DenseMatrix*, const DenseMatrix*>> tensor_list(GnnModel& model,
                                                                     const ModelGrads& grads) {
    std::vector<std::pair<DenseMatrix*, const DenseMatrix*>> out;
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        for (std::size_t k = 0; k < model.layers[l].weights.size(); ++k)
            out.emplace_back(&model.layers[l].weights[k], &grads.layer_weights[l][k]);
        if (model.layers[l].gat_attention)
            out.emplace_back(&*model.layers[l].gat_attention, &*grads.gat_attention[l]);
    }
    for (auto& [task, head] : model.heads) out.emplace_back(&head, &grads.heads.at(task));
    return out;
}

} // namespace

double grad_check(const GnnModel& model, const Graph& graph, const TaskSpec& task,
                  std::size_t num_coords, std::uint64_t seed) {
    if (num_coords == 0) throw ParameterError("grad_check: num_coords must be >= 1");
    const double h = 1e-5;
    const double kink_tol = 1e-6;

    LossResult base = loss_and_grad(model, graph, task);
    GnnModel probe = model;
    auto tensors = tensor_list(probe, base.grads);
    std::size_t total = 0;
    for (const auto& [w, g] : tensors) total += w->size();
    if (total == 0) throw ParameterError("grad_check: model has no parameters");

    Rng rng(seed);
    double max_rel = 0.0;
    std::size_t done = 0;
    std::size_t attempts = 0;
    const std::size_t max_attempts = num_coords * 10 + 100;
    while (done < num_coords && attempts < max_attempts) {
        ++attempts;
        std::size_t flat = static_cast<std::size_t>(rng.integer(total));
        std::size_t t = 0;
        while (flat >= tensors[t].first->size()) flat -= tensors[t++].first->size();
        double& w = tensors[t].first->values()[flat];
        const double analytic = tensors[t].second->values()[flat];

        const double saved = w;
        double min_logit = std::numeric_limits<double>::infinity();
        double m;
        w = saved + h;
        const double lp = loss_only(probe, graph, task, &m);
        min_logit = std::min(min_logit, m);
        w = saved - h;
        const double lm = loss_only(probe, graph, task, &m);
        min_logit = std::min(min_logit, m);
        w = saved;
        min_logit = std::min(min_logit, base.min_abs_attention_logit);
        if (min_logit < kink_tol) continue; // too close to a LeakyReLU kink

        const double numeric = (lp - lm) / (2.0 * h);
        const double rel = std::fabs(analytic - numeric) /
                           std::max({std::fabs(analytic), std::fabs(numeric), 1e-8});
        max_rel = std::max(max_rel, rel);
        ++done;
    }
    return max_rel;
}

} // namespace gnnmerge
