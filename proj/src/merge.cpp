#include "gnnmerge/merge.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "gnnmerge/errors.hpp"
#include "gnnmerge/layers.hpp"
#include "gnnmerge/parallel.hpp"
#include "gnnmerge/reduction.hpp"
#include "gnnmerge/trainer.hpp"

namespace gnnmerge {

namespace {

const Graph& graph_for_model(const std::vector<Graph>& graphs, std::size_t i) {
    return graphs.size() == 1 ? graphs[0] : graphs[i];
}

void check_skeletons(const std::vector<GnnModel>& models) {
    if (models.empty()) throw ConfigurationError("merge: no models given");
    for (std::size_t i = 1; i < models.size(); ++i) {
        const int layer = first_skeleton_mismatch(models[0], models[i]);
        if (layer >= 0) {
            throw IncompatibilityError(
                "models 0 and " + std::to_string(i) + " differ at layer " +
                std::to_string(layer) + ": " + describe_layer(models[0], layer) + " vs " +
                describe_layer(models[i], layer));
        }
    }
}

void check_merge_inputs(const std::vector<GnnModel>& models,
                        const std::vector<Graph>& graphs) {
    check_skeletons(models);
    if (graphs.size() != 1 && graphs.size() != models.size()) {
        throw ConfigurationError("merge: need one merging graph or one per model (" +
                                 std::to_string(graphs.size()) + " graphs for " +
                                 std::to_string(models.size()) + " models)");
    }
}

DenseMatrix& transform_tensor(LayerSpec& layer, std::size_t k) {
    if (layer.arch == Arch::Gat && k == 1) return *layer.gat_attention;
    return layer.weights[k];
}

const DenseMatrix& transform_tensor(const LayerSpec& layer, std::size_t k) {
    if (layer.arch == Arch::Gat && k == 1) return *layer.gat_attention;
    return layer.weights[k];
}

MergeStatistics init_statistics(const GnnModel& skeleton) {
    MergeStatistics stats;
    for (const auto& layer : skeleton.layers) {
        std::vector<TransformStatistics> ts;
        for (std::size_t k = 0; k < layer.num_transforms(); ++k) {
            const DenseMatrix& w = transform_tensor(layer, k);
            TransformStatistics t;
            t.s_zz = DenseMatrix(w.rows(), w.rows());
            t.s_zg = DenseMatrix(w.rows(), w.cols());
            ts.push_back(std::move(t));
        }
        stats.layers.push_back(std::move(ts));
    }
    return stats;
}

void accumulate(TransformStatistics& ts, const DenseMatrix& z, const DenseMatrix& g) {
    ts.s_zz = gram_accumulate(ts.s_zz, z);
    ts.s_zg = cross_accumulate(ts.s_zg, z, g);
    ts.row_count += z.rows();
    ts.g_norm_sq += frobenius_dot(g, g);
}

// Row blocks of the GAT edge transform belonging to target nodes: node v
// owns rows [csr_offsets[v] + v, csr_offsets[v+1] + v + 1).
std::vector<std::uint32_t> gat_edge_rows_for_targets(const Graph& graph,
                                                     const std::vector<std::uint32_t>& targets) {
    std::vector<std::uint32_t> rows;
    for (std::uint32_t v : targets) {
        const std::uint64_t begin = graph.csr_offsets[v] + v;
        const std::uint64_t end = graph.csr_offsets[v + 1] + v + 1;
        for (std::uint64_t r = begin; r < end; ++r)
            rows.push_back(static_cast<std::uint32_t>(r));
    }
    return rows;
}

// Full-capture accumulation, optionally restricted to target rows.
void accumulate_from_trace(MergeStatistics& stats, const GnnModel& model, const Graph& graph,
                           const ActivationTrace& trace,
                           const std::vector<std::uint32_t>* targets) {
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        const LayerSpec& spec = model.layers[l];
        const LayerResult& lr = trace.layers[l];
        for (std::size_t k = 0; k < spec.num_transforms(); ++k) {
            if (!targets) {
                accumulate(stats.layers[l][k], lr.z[k], lr.g[k]);
                continue;
            }
            const bool edge_level = spec.arch == Arch::Gat && k == 1;
            const std::vector<std::uint32_t> rows =
                edge_level ? gat_edge_rows_for_targets(graph, *targets) : *targets;
            accumulate(stats.layers[l][k], gather_rows(lr.z[k], rows),
                       gather_rows(lr.g[k], rows));
        }
    }
}

// Target-row (z, g) pairs of one layer computed over the condensed edge set
// from the precomputed full-graph layer input (restricted to the view).
// Loops mirror the full layer implementations exactly, so the rows are
// bit-identical to the full-graph capture restricted to targets.
std::vector<std::pair<DenseMatrix, DenseMatrix>> condensed_layer_rows(
    const LayerSpec& spec, const CondensedView& view, const DenseMatrix& h_local) {
    const std::size_t nt = view.target_local.size();
    const std::size_t in = spec.in_dim;
    std::vector<std::pair<DenseMatrix, DenseMatrix>> out;

    auto arcs_of = [&view](std::size_t local) {
        return std::span<const std::uint32_t>(view.arcs.data() + view.offsets[local],
                                              view.arcs.data() + view.offsets[local + 1]);
    };

    switch (spec.arch) {
        case Arch::Gcn: {
            DenseMatrix z(nt, in);
            for (std::size_t t = 0; t < nt; ++t) {
                const std::uint32_t lt = view.target_local[t];
                const double dv = std::sqrt(static_cast<double>(view.degree_self[lt]));
                double* zrow = z.row(t);
                for (std::uint32_t u : arcs_of(lt)) {
                    const double c =
                        1.0 / (std::sqrt(static_cast<double>(view.degree_self[u])) * dv);
                    const double* hrow = h_local.row(u);
                    for (std::size_t j = 0; j < in; ++j) zrow[j] += c * hrow[j];
                }
                const double cself = 1.0 / (dv * dv);
                const double* hrow = h_local.row(lt);
                for (std::size_t j = 0; j < in; ++j) zrow[j] += cself * hrow[j];
            }
            DenseMatrix g = matmul(z, spec.weights[0]);
            out.emplace_back(std::move(z), std::move(g));
            break;
        }
        case Arch::Sage: {
            DenseMatrix z_self(nt, in);
            DenseMatrix z_neigh(nt, in);
            for (std::size_t t = 0; t < nt; ++t) {
                const std::uint32_t lt = view.target_local[t];
                const double* hrow = h_local.row(lt);
                double* srow = z_self.row(t);
                for (std::size_t j = 0; j < in; ++j) srow[j] = hrow[j];
                auto arcs = arcs_of(lt);
                if (arcs.empty()) continue;
                double* krow = z_neigh.row(t);
                for (std::uint32_t u : arcs) {
                    const double* nrow = h_local.row(u);
                    for (std::size_t j = 0; j < in; ++j) krow[j] += nrow[j];
                }
                const double inv = 1.0 / static_cast<double>(arcs.size());
                for (std::size_t j = 0; j < in; ++j) krow[j] *= inv;
            }
            DenseMatrix g0 = matmul(z_self, spec.weights[0]);
            DenseMatrix g1 = matmul(z_neigh, spec.weights[1]);
            out.emplace_back(std::move(z_self), std::move(g0));
            out.emplace_back(std::move(z_neigh), std::move(g1));
            break;
        }
        case Arch::Gin: {
            DenseMatrix z(nt, in);
            for (std::size_t t = 0; t < nt; ++t) {
                const std::uint32_t lt = view.target_local[t];
                const double* hrow = h_local.row(lt);
                double* krow = z.row(t);
                for (std::size_t j = 0; j < in; ++j) krow[j] = hrow[j];
                for (std::uint32_t u : arcs_of(lt)) {
                    const double* nrow = h_local.row(u);
                    for (std::size_t j = 0; j < in; ++j) krow[j] += nrow[j];
                }
            }
            for (std::size_t k = 0; k < spec.weights.size(); ++k) {
                DenseMatrix g = matmul(z, spec.weights[k]);
                DenseMatrix next = (k + 1 < spec.weights.size())
                                       ? apply_activation(g, Activation::Relu)
                                       : DenseMatrix();
                out.emplace_back(std::move(z), std::move(g));
                z = std::move(next);
            }
            break;
        }
        case Arch::Gat: {
            const std::size_t d_out = spec.out_dim;
            const DenseMatrix& w = spec.weights[0];
            const DenseMatrix& a = *spec.gat_attention;
            const DenseMatrix q_local = matmul(h_local, w);

            std::size_t edge_rows = 0;
            for (std::uint32_t lt : view.target_local)
                edge_rows += arcs_of(lt).size() + 1;

            DenseMatrix z_edge(edge_rows, 2 * d_out);
            DenseMatrix g_edge(edge_rows, 1);
            DenseMatrix z_node(nt, in);
            std::size_t p = 0;
            for (std::size_t t = 0; t < nt; ++t) {
                const std::uint32_t lt = view.target_local[t];
                auto arcs = arcs_of(lt);
                const std::size_t count = arcs.size() + 1;
                auto attended = [&](std::size_t i) {
                    return i < arcs.size() ? arcs[i] : lt;
                };
                for (std::size_t i = 0; i < count; ++i) {
                    const std::uint32_t u = attended(i);
                    double* row = z_edge.row(p + i);
                    const double* qv = q_local.row(lt);
                    const double* qu = q_local.row(u);
                    double s = 0.0;
                    for (std::size_t j = 0; j < d_out; ++j) {
                        row[j] = qv[j];
                        row[d_out + j] = qu[j];
                        s += qv[j] * a(j, 0) + qu[j] * a(d_out + j, 0);
                    }
                    g_edge(p + i, 0) = s;
                }
                double maxe = -std::numeric_limits<double>::infinity();
                for (std::size_t i = 0; i < count; ++i)
                    maxe = std::max(maxe, leaky_relu(g_edge(p + i, 0)));
                std::vector<double> alpha(count);
                double denom = 0.0;
                for (std::size_t i = 0; i < count; ++i) {
                    alpha[i] = std::exp(leaky_relu(g_edge(p + i, 0)) - maxe);
                    denom += alpha[i];
                }
                double* zrow = z_node.row(t);
                for (std::size_t i = 0; i < count; ++i) {
                    const double av = alpha[i] / denom;
                    const double* hrow = h_local.row(attended(i));
                    for (std::size_t j = 0; j < in; ++j) zrow[j] += av * hrow[j];
                }
                p += count;
            }
            DenseMatrix g_node = matmul(z_node, w);
            out.emplace_back(std::move(z_node), std::move(g_node));
            out.emplace_back(std::move(z_edge), std::move(g_edge));
            break;
        }
    }
    return out;
}

MergeStatistics single_model_statistics(const GnnModel& model, const Graph& graph,
                                        const MergeConfig& config) {
    MergeStatistics stats = init_statistics(model);
    if (config.sample_ratio >= 1.0) {
        const ForwardResult fwd = forward(model, graph, /*capture=*/true);
        accumulate_from_trace(stats, model, graph, fwd.trace, nullptr);
        return stats;
    }
    const TargetSet targets = sample_targets(graph, config.sample_ratio, config.seed);
    if (!config.condense) {
        const ForwardResult fwd = forward(model, graph, /*capture=*/true);
        accumulate_from_trace(stats, model, graph, fwd.trace, &targets.indices);
        return stats;
    }
    // Condensed path: layer inputs are precomputed on the full graph, then
    // target-row aggregation runs over the condensed edge set only.
    const CondensedView view = condense_one_hop(graph, targets);
    DenseMatrix h = graph.features;
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        const LayerSpec& spec = model.layers[l];
        const DenseMatrix h_local = gather_rows(h, view.nodes);
        auto rows = condensed_layer_rows(spec, view, h_local);
        for (std::size_t k = 0; k < rows.size(); ++k)
            accumulate(stats.layers[l][k], rows[k].first, rows[k].second);
        if (l + 1 < model.layers.size()) h = run_layer(h, graph, spec).h;
    }
    return stats;
}

double resolve_ridge(const MergeConfig& config, const TransformStatistics& ts) {
    if (config.ridge) return *config.ridge;
    double diag = 0.0;
    for (std::size_t i = 0; i < ts.s_zz.rows(); ++i) diag += ts.s_zz(i, i);
    if (ts.s_zz.rows() > 0) diag /= static_cast<double>(ts.s_zz.rows());
    return 1e-6 * diag;
}

std::map<std::string, DenseMatrix> merge_heads(const std::vector<GnnModel>& models) {
    std::map<std::string, DenseMatrix> heads;
    for (const auto& model : models) {
        for (const auto& [task, head] : model.heads) {
            auto it = heads.find(task);
            if (it == heads.end()) {
                heads.emplace(task, head);
            } else if (!bits_equal(it->second, head)) {
                throw IncompatibilityError("merge: task '" + task +
                                           "' has conflicting heads across models");
            }
        }
    }
    return heads;
}

GnnModel merged_shell(const std::vector<GnnModel>& models, const char* method) {
    GnnModel merged = models[0];
    merged.heads = merge_heads(models);
    for (auto it = merged.metadata.begin(); it != merged.metadata.end();) {
        if (it->first.rfind("train.", 0) == 0 || it->first.rfind("head.", 0) == 0) {
            it = merged.metadata.erase(it);
        } else {
            ++it;
        }
    }
    merged.metadata["merge.method"] = method;
    merged.metadata["merge.num_models"] = std::to_string(models.size());
    return merged;
}

struct TransformRef {
    std::size_t layer;
    std::size_t k;
};

std::vector<TransformRef> all_transforms(const GnnModel& model) {
    std::vector<TransformRef> refs;
    for (std::size_t l = 0; l < model.layers.size(); ++l)
        for (std::size_t k = 0; k < model.layers[l].num_transforms(); ++k)
            refs.push_back({l, k});
    return refs;
}

} // namespace

MergeStatistics collect_statistics(const std::vector<GnnModel>& models,
                                   const std::vector<Graph>& merging_graphs,
                                   const MergeConfig& config) {
    check_merge_inputs(models, merging_graphs);
    std::vector<MergeStatistics> per_model(models.size());
    parallel_for(models.size(), merge_thread_count(), [&](std::size_t i) {
        per_model[i] =
            single_model_statistics(models[i], strip_labels(graph_for_model(merging_graphs, i)),
                                    config);
    });
    // Deterministic reduction in model-index order.
    MergeStatistics total = std::move(per_model[0]);
    for (std::size_t i = 1; i < per_model.size(); ++i) {
        for (std::size_t l = 0; l < total.layers.size(); ++l) {
            for (std::size_t k = 0; k < total.layers[l].size(); ++k) {
                TransformStatistics& t = total.layers[l][k];
                const TransformStatistics& s = per_model[i].layers[l][k];
                t.s_zz = add(t.s_zz, s.s_zz);
                t.s_zg = add(t.s_zg, s.s_zg);
                t.row_count += s.row_count;
                t.g_norm_sq += s.g_norm_sq;
            }
        }
    }
    return total;
}

GnnModel analytical_merge(const std::vector<GnnModel>& models,
                          const std::vector<Graph>& merging_graphs,
                          const MergeConfig& config) {
    const MergeStatistics stats = collect_statistics(models, merging_graphs, config);
    GnnModel merged = merged_shell(models, "analytical");
    const auto refs = all_transforms(merged);
    parallel_for(refs.size(), merge_thread_count(), [&](std::size_t i) {
        const auto [l, k] = refs[i];
        const TransformStatistics& ts = stats.layers[l][k];
        try {
            transform_tensor(merged.layers[l], k) =
                solve_spd(ts.s_zz, ts.s_zg, resolve_ridge(config, ts));
        } catch (const SingularMatrixError& e) {
            throw SingularMatrixError("layer " + std::to_string(l) + " transform " +
                                      std::to_string(k) + ": " + e.what());
        }
    });
    return merged;
}

GnnModel iterative_merge(const std::vector<GnnModel>& models,
                         const std::vector<Graph>& merging_graphs,
                         const MergeConfig& config) {
    const MergeStatistics stats = collect_statistics(models, merging_graphs, config);
    GnnModel merged = weight_average(models);
    merged.metadata["merge.method"] = "iterative";
    const auto refs = all_transforms(merged);
    parallel_for(refs.size(), merge_thread_count(), [&](std::size_t i) {
        const auto [l, k] = refs[i];
        const TransformStatistics& ts = stats.layers[l][k];
        DenseMatrix& w = transform_tensor(merged.layers[l], k);
        const double row_scale =
            ts.row_count > 0 ? 1.0 / static_cast<double>(ts.row_count) : 1.0;
        double prev = transform_objective(ts, w);
        int rising = 0;
        for (std::size_t step = 0; step < config.iterative_steps; ++step) {
            // grad = 2 (s_zz W - s_zg), scaled by the accumulated row count.
            DenseMatrix grad = matmul(ts.s_zz, w);
            axpy(grad, -1.0, ts.s_zg);
            axpy(w, -2.0 * config.iterative_lr * row_scale, grad);
            const double obj = transform_objective(ts, w);
            rising = obj > prev ? rising + 1 : 0;
            if (rising >= 10) {
                throw OptimizationError(
                    "iterative merge diverged at layer " + std::to_string(l) + " transform " +
                    std::to_string(k) + " (objective rose 10 consecutive steps); try a smaller "
                    "iterative learning rate");
            }
            prev = obj;
        }
    });
    return merged;
}

GnnModel weight_average(const std::vector<GnnModel>& models) {
    check_skeletons(models);
    GnnModel merged = merged_shell(models, "wavg");
    const double inv = 1.0 / static_cast<double>(models.size());
    const auto refs = all_transforms(merged);
    for (const auto& [l, k] : refs) {
        DenseMatrix sum = transform_tensor(models[0].layers[l], k);
        for (std::size_t i = 1; i < models.size(); ++i)
            axpy(sum, 1.0, transform_tensor(models[i].layers[l], k));
        transform_tensor(merged.layers[l], k) = scale(sum, inv);
    }
    return merged;
}

GnnModel joint_merge(const std::vector<GnnModel>& models,
                     const std::vector<Graph>& merging_graphs,
                     const MergeConfig& config) {
    check_merge_inputs(models, merging_graphs);
    std::vector<Graph> views;
    views.reserve(merging_graphs.size());
    for (const auto& g : merging_graphs) views.push_back(strip_labels(g));

    // Captured per-layer embeddings of each base model on its merging graph.
    std::vector<ForwardResult> base_fwd;
    base_fwd.reserve(models.size());
    for (std::size_t i = 0; i < models.size(); ++i)
        base_fwd.push_back(forward(models[i], graph_for_model(views, i), /*capture=*/true));

    GnnModel merged = weight_average(models);
    merged.metadata["merge.method"] = "joint";
    const std::size_t num_layers = merged.layers.size();
    // Adam with the trainer's betas/eps; the step size starts below the
    // trainer default, which balloons the stacked multi-layer objective from
    // a weight-average start. A 10-step rise streak halves the step size
    // (Adam reorients in streaks on deep objectives); only a streak that
    // persists after repeated halving is treated as divergence.
    double lr = 0.005;
    int halvings = 0;
    AdamOptimizer opt(merged, lr);

    double prev_loss = std::numeric_limits<double>::infinity();
    int rising = 0;
    for (std::size_t step = 0; step < config.iterative_steps; ++step) {
        double loss = 0.0;
        ModelGrads grads = zero_grads_like(merged);
        for (std::size_t i = 0; i < models.size(); ++i) {
            const Graph& graph = graph_for_model(views, i);
            const ForwardResult fwd = forward(merged, graph, /*capture=*/true);
            DenseMatrix dh;
            for (std::size_t l = num_layers; l-- > 0;) {
                const DenseMatrix diff =
                    subtract(fwd.trace.layers[l].h, base_fwd[i].trace.layers[l].h);
                loss += frobenius_dot(diff, diff);
                DenseMatrix direct = scale(diff, 2.0);
                if (l + 1 == num_layers) {
                    dh = std::move(direct);
                } else {
                    axpy(dh, 1.0, direct);
                }
                DenseMatrix dh_prev;
                LayerGrads lg = layer_backward(merged.layers[l], graph,
                                               fwd.trace.layer_input(l), fwd.trace.layers[l],
                                               dh, dh_prev);
                for (std::size_t k = 0; k < lg.weights.size(); ++k)
                    axpy(grads.layer_weights[l][k], 1.0, lg.weights[k]);
                if (lg.gat_attention)
                    axpy(*grads.gat_attention[l], 1.0, *lg.gat_attention);
                dh = std::move(dh_prev);
            }
        }
        rising = loss > prev_loss ? rising + 1 : 0;
        if (rising >= 10) {
            if (++halvings > 10) {
                throw OptimizationError(
                    "joint merge diverged (objective kept rising after repeated step-size "
                    "reduction); try a smaller learning rate or step budget");
            }
            lr *= 0.5;
            opt = AdamOptimizer(merged, lr);
            rising = 0;
        }
        prev_loss = loss;
        opt.step(merged, grads);
    }
    return merged;
}

std::vector<double> alignment_report(const GnnModel& merged, const GnnModel& base,
                                     const Graph& graph) {
    const int mismatch = first_skeleton_mismatch(merged, base);
    if (mismatch >= 0) {
        throw ShapeError("alignment_report: models differ at layer " + std::to_string(mismatch));
    }
    const ForwardResult fm = forward(merged, graph, /*capture=*/true);
    const ForwardResult fb = forward(base, graph, /*capture=*/true);
    std::vector<double> out;
    for (std::size_t l = 0; l < merged.layers.size(); ++l) {
        const DenseMatrix& hm = fm.trace.layers[l].h;
        const DenseMatrix& hb = fb.trace.layers[l].h;
        double sum = 0.0;
        for (std::size_t v = 0; v < hm.rows(); ++v) {
            double sq = 0.0;
            for (std::size_t j = 0; j < hm.cols(); ++j) {
                const double d = hm(v, j) - hb(v, j);
                sq += d * d;
            }
            sum += std::sqrt(sq);
        }
        out.push_back(hm.rows() > 0 ? sum / static_cast<double>(hm.rows()) : 0.0);
    }
    return out;
}

void write_alignment_csv(const std::vector<double>& per_layer, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot open " + path + " for writing");
    out << "layer,mean_l2\n";
    char buf[64];
    for (std::size_t l = 0; l < per_layer.size(); ++l) {
        std::snprintf(buf, sizeof(buf), "%zu,%.9g\n", l + 1, per_layer[l]);
        out << buf;
    }
}

double transform_objective(const TransformStatistics& ts, const DenseMatrix& w) {
    return frobenius_dot(w, matmul(ts.s_zz, w)) - 2.0 * frobenius_dot(w, ts.s_zg) +
           ts.g_norm_sq;
}

double relaxed_quadratic_objective(const MergeStatistics& stats, const GnnModel& model) {
    double total = 0.0;
    for (std::size_t l = 0; l < stats.layers.size(); ++l)
        for (std::size_t k = 0; k < stats.layers[l].size(); ++k)
            total += transform_objective(stats.layers[l][k],
                                         transform_tensor(model.layers[l], k));
    return total;
}

double joint_alignment_objective(const GnnModel& merged, const std::vector<GnnModel>& models,
                                 const std::vector<Graph>& merging_graphs) {
    check_merge_inputs(models, merging_graphs);
    double total = 0.0;
    for (std::size_t i = 0; i < models.size(); ++i) {
        const Graph view = strip_labels(graph_for_model(merging_graphs, i));
        const ForwardResult fb = forward(models[i], view, /*capture=*/true);
        const ForwardResult fm = forward(merged, view, /*capture=*/true);
        for (std::size_t l = 0; l < merged.layers.size(); ++l) {
            const DenseMatrix diff = subtract(fm.trace.layers[l].h, fb.trace.layers[l].h);
            total += frobenius_dot(diff, diff);
        }
    }
    return total;
}

double relaxed_alignment_objective(const GnnModel& merged,
                                   const std::vector<GnnModel>& models,
                                   const std::vector<Graph>& merging_graphs) {
    check_merge_inputs(models, merging_graphs);
    double total = 0.0;
    for (std::size_t i = 0; i < models.size(); ++i) {
        const Graph view = strip_labels(graph_for_model(merging_graphs, i));
        const ForwardResult fb = forward(models[i], view, /*capture=*/true);
        for (std::size_t l = 0; l < merged.layers.size(); ++l) {
            // The merged layer runs on the base model's previous-layer output.
            const LayerResult lr =
                run_layer(fb.trace.layer_input(l), view, merged.layers[l]);
            const DenseMatrix diff = subtract(lr.h, fb.trace.layers[l].h);
            total += frobenius_dot(diff, diff);
        }
    }
    return total;
}

} // namespace gnnmerge
