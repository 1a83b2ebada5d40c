#include "gnnmerge/splits.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <json.hpp>

#include "gnnmerge/errors.hpp"
#include "gnnmerge/rng.hpp"

namespace gnnmerge {

namespace {

NodeSplit make_node_split(std::vector<std::uint32_t> labeled, std::size_t num_classes,
                          Rng& rng) {
    shuffle(labeled, rng);
    const std::size_t m = labeled.size();
    const std::size_t n_train = static_cast<std::size_t>(0.6 * static_cast<double>(m));
    const std::size_t n_val = static_cast<std::size_t>(0.2 * static_cast<double>(m));
    NodeSplit s;
    s.num_classes = num_classes;
    s.train.assign(labeled.begin(), labeled.begin() + n_train);
    s.val.assign(labeled.begin() + n_train, labeled.begin() + n_train + n_val);
    s.test.assign(labeled.begin() + n_train + n_val, labeled.end());
    std::sort(s.train.begin(), s.train.end());
    std::sort(s.val.begin(), s.val.end());
    std::sort(s.test.begin(), s.test.end());
    return s;
}

} // namespace

DisjointLabelSplit disjoint_label_split(const Graph& g, std::uint64_t seed) {
    if (!g.has_labels()) throw ParameterError("disjoint_label_split: graph has no labels");
    std::int32_t max_label = -1;
    for (std::int32_t l : g.labels) max_label = std::max(max_label, l);
    if (max_label < 1) {
        throw ParameterError("disjoint_label_split: need at least 2 classes");
    }
    const std::size_t num_classes = static_cast<std::size_t>(max_label) + 1;
    // Odd class counts give the extra class to task A.
    const std::size_t split_at = (num_classes + 1) / 2;

    DisjointLabelSplit out;
    out.task_a.graph = g;
    out.task_b.graph = g;
    std::vector<std::uint32_t> labeled_a, labeled_b;
    for (std::size_t v = 0; v < g.num_nodes; ++v) {
        const std::int32_t l = g.labels[v];
        if (l < 0) {
            out.task_a.graph.labels[v] = -1;
            out.task_b.graph.labels[v] = -1;
        } else if (static_cast<std::size_t>(l) < split_at) {
            out.task_a.graph.labels[v] = l;
            out.task_b.graph.labels[v] = -1;
            labeled_a.push_back(static_cast<std::uint32_t>(v));
        } else {
            out.task_a.graph.labels[v] = -1;
            out.task_b.graph.labels[v] = l - static_cast<std::int32_t>(split_at);
            labeled_b.push_back(static_cast<std::uint32_t>(v));
        }
    }
    Rng rng(seed);
    out.task_a.split = make_node_split(std::move(labeled_a), split_at, rng);
    out.task_b.split = make_node_split(std::move(labeled_b), num_classes - split_at, rng);
    return out;
}

EdgeSplit link_split(const Graph& g, std::uint64_t seed) {
    if (!is_undirected(g)) throw ParameterError("link_split: graph must be undirected");
    std::vector<EdgePair> pos = undirected_edges(g);
    if (pos.size() < 10) {
        throw ParameterError("link_split: need at least 10 undirected edges, have " +
                             std::to_string(pos.size()));
    }
    Rng rng(seed);
    shuffle(pos, rng);
    const std::size_t m = pos.size();
    const std::size_t n_train = static_cast<std::size_t>(0.7 * static_cast<double>(m));
    const std::size_t n_val = static_cast<std::size_t>(0.1 * static_cast<double>(m));

    const std::size_t n = g.num_nodes;
    const std::size_t pair_pool = n * (n - 1) / 2;
    if (pair_pool < m + m) {
        throw ParameterError("link_split: graph too dense to sample " + std::to_string(m) +
                             " negative edges");
    }

    std::set<EdgePair> taken;
    auto sample_negatives = [&](std::size_t count) {
        std::vector<EdgePair> neg;
        neg.reserve(count);
        while (neg.size() < count) {
            auto u = static_cast<std::uint32_t>(rng.integer(n));
            auto v = static_cast<std::uint32_t>(rng.integer(n));
            if (u == v) continue;
            if (u > v) std::swap(u, v);
            auto nbrs = g.neighbors(u);
            if (std::binary_search(nbrs.begin(), nbrs.end(), v)) continue;
            if (!taken.insert({u, v}).second) continue;
            neg.emplace_back(u, v);
        }
        return neg;
    };

    EdgeSplit s;
    s.train.pos.assign(pos.begin(), pos.begin() + n_train);
    s.val.pos.assign(pos.begin() + n_train, pos.begin() + n_train + n_val);
    s.test.pos.assign(pos.begin() + n_train + n_val, pos.end());
    s.train.neg = sample_negatives(s.train.pos.size());
    s.val.neg = sample_negatives(s.val.pos.size());
    s.test.neg = sample_negatives(s.test.pos.size());
    return s;
}

void validate_node_split(const NodeSplit& s, std::size_t num_nodes) {
    std::set<std::uint32_t> seen;
    for (const auto* part : {&s.train, &s.val, &s.test}) {
        for (std::uint32_t v : *part) {
            if (v >= num_nodes) {
                throw FormatError("node split: index " + std::to_string(v) + " out of range");
            }
            if (!seen.insert(v).second) {
                throw FormatError("node split: index " + std::to_string(v) +
                                  " appears in more than one partition");
            }
        }
    }
}

void validate_edge_split(const EdgeSplit& s, const Graph& g) {
    std::set<EdgePair> seen_pos, seen_neg;
    for (const auto* part : {&s.train, &s.val, &s.test}) {
        if (part->pos.size() != part->neg.size()) {
            throw FormatError("edge split: positive/negative counts differ in a partition");
        }
        for (const auto& e : part->pos) {
            auto nbrs = g.neighbors(e.first);
            if (!std::binary_search(nbrs.begin(), nbrs.end(), e.second)) {
                throw FormatError("edge split: positive pair is not an edge");
            }
            if (!seen_pos.insert(e).second) {
                throw FormatError("edge split: positive edge repeated across partitions");
            }
        }
        for (const auto& e : part->neg) {
            auto nbrs = g.neighbors(e.first);
            if (std::binary_search(nbrs.begin(), nbrs.end(), e.second)) {
                throw FormatError("edge split: negative pair is an actual edge");
            }
            if (!seen_neg.insert(e).second) {
                throw FormatError("edge split: negative pair repeated across partitions");
            }
        }
    }
}

namespace {

nlohmann::json pairs_to_json(const std::vector<EdgePair>& pairs) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [u, v] : pairs) arr.push_back({u, v});
    return arr;
}

std::vector<EdgePair> pairs_from_json(const nlohmann::json& arr) {
    std::vector<EdgePair> out;
    for (const auto& e : arr) out.emplace_back(e.at(0).get<std::uint32_t>(), e.at(1).get<std::uint32_t>());
    return out;
}

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open split file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("malformed split file " + path + ": " + e.what());
    }
    return j;
}

void write_json_file(const nlohmann::json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot open " + path + " for writing");
    out << j.dump(2) << "\n";
}

} // namespace

void save_node_split(const NodeSplit& s, const std::string& path) {
    nlohmann::json j;
    j["kind"] = "node";
    j["num_classes"] = s.num_classes;
    j["train"] = s.train;
    j["val"] = s.val;
    j["test"] = s.test;
    write_json_file(j, path);
}

NodeSplit load_node_split(const std::string& path) {
    const nlohmann::json j = read_json_file(path);
    try {
        if (j.at("kind").get<std::string>() != "node") {
            throw FormatError(path + ": not a node split file");
        }
        NodeSplit s;
        s.num_classes = j.at("num_classes").get<std::size_t>();
        s.train = j.at("train").get<std::vector<std::uint32_t>>();
        s.val = j.at("val").get<std::vector<std::uint32_t>>();
        s.test = j.at("test").get<std::vector<std::uint32_t>>();
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("malformed node split " + path + ": " + e.what());
    }
}

void save_edge_split(const EdgeSplit& s, const std::string& path) {
    nlohmann::json j;
    j["kind"] = "link";
    for (const auto& [name, part] :
         {std::pair{"train", &s.train}, {"val", &s.val}, {"test", &s.test}}) {
        j[name]["pos"] = pairs_to_json(part->pos);
        j[name]["neg"] = pairs_to_json(part->neg);
    }
    write_json_file(j, path);
}

EdgeSplit load_edge_split(const std::string& path) {
    const nlohmann::json j = read_json_file(path);
    try {
        if (j.at("kind").get<std::string>() != "link") {
            throw FormatError(path + ": not a link split file");
        }
        EdgeSplit s;
        s.train.pos = pairs_from_json(j.at("train").at("pos"));
        s.train.neg = pairs_from_json(j.at("train").at("neg"));
        s.val.pos = pairs_from_json(j.at("val").at("pos"));
        s.val.neg = pairs_from_json(j.at("val").at("neg"));
        s.test.pos = pairs_from_json(j.at("test").at("pos"));
        s.test.neg = pairs_from_json(j.at("test").at("neg"));
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("malformed link split " + path + ": " + e.what());
    }
}

std::string split_file_kind(const std::string& path) {
    const nlohmann::json j = read_json_file(path);
    try {
        return j.at("kind").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("malformed split file " + path + ": " + e.what());
    }
}

} // namespace gnnmerge
