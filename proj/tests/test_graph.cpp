#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <set>

#include "gnnmerge/errors.hpp"
#include "gnnmerge/graph.hpp"
#include "gnnmerge/splits.hpp"
#include "gnnmerge/synth.hpp"
#include "test_util.hpp"

using namespace gnnmerge;

namespace {

std::string tmp_path(const char* name) {
    return std::string("/tmp/gnnmerge_test_") + name;
}

std::string read_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace

TEST_CASE("graph round-trip is bit-identical") {
    SUBCASE("empty graph") {
        Graph g;
        g.num_nodes = 0;
        g.csr_offsets = {0};
        g.features = DenseMatrix(0, 4);
        const std::string path = tmp_path("empty.gnmg");
        save_graph(g, path);
        const Graph back = load_graph(path);
        CHECK(back.num_nodes == 0);
        CHECK(back.feature_dim() == 4);
        save_graph(back, path + ".2");
        CHECK(read_bytes(path) == read_bytes(path + ".2"));
    }
    SUBCASE("3-node path graph") {
        const Graph g = testutil::make_graph(3, {{0, 1}, {1, 2}}, 2, 42);
        const std::string path = tmp_path("path3.gnmg");
        save_graph(g, path);
        save_graph(load_graph(path), path + ".2");
        CHECK(read_bytes(path) == read_bytes(path + ".2"));
    }
    SUBCASE("SBM graph, checksum stable across saves") {
        const Graph g = generate_sbm(5, 100, 0.2, 0.01, 8, 0.5, 99);
        const std::string path = tmp_path("sbm500.gnmg");
        save_graph(g, path);
        save_graph(g, path + ".again");
        CHECK(read_bytes(path) == read_bytes(path + ".again"));
        const Graph back = load_graph(path);
        validate_graph(back);
        CHECK(back.num_nodes == 500);
        save_graph(back, path + ".2");
        CHECK(read_bytes(path) == read_bytes(path + ".2"));
    }
}

TEST_CASE("graph loader rejects malformed files with byte offsets") {
    const Graph g = testutil::make_graph(3, {{0, 1}, {1, 2}}, 2, 42);
    const std::string path = tmp_path("broken.gnmg");
    save_graph(g, path);
    const std::string good = read_bytes(path);

    SUBCASE("bad magic") {
        std::string bad = good;
        bad[0] = 'X';
        std::ofstream(path, std::ios::binary) << bad;
        CHECK_THROWS_WITH_AS(load_graph(path), doctest::Contains("magic"), FormatError);
    }
    SUBCASE("unknown version") {
        std::string bad = good;
        bad[4] = 9;
        std::ofstream(path, std::ios::binary) << bad;
        CHECK_THROWS_WITH_AS(load_graph(path), doctest::Contains("version"), FormatError);
    }
    SUBCASE("truncated payload") {
        std::ofstream(path, std::ios::binary) << good.substr(0, good.size() - 3);
        CHECK_THROWS_WITH_AS(load_graph(path), doctest::Contains("byte offset"), FormatError);
    }
    SUBCASE("invariant violation: target out of range") {
        std::string bad = good;
        // First csr target lives right after the 29-byte header + 4 offsets.
        const std::size_t target_pos = 29 + 4 * 8;
        bad[target_pos] = 77;
        std::ofstream(path, std::ios::binary) << bad;
        CHECK_THROWS_AS(load_graph(path), FormatError);
    }
}

TEST_CASE("degrees_with_self_loop") {
    const Graph isolated = testutil::make_graph(1, {}, 2, 1);
    CHECK(degrees_with_self_loop(isolated) == std::vector<std::uint64_t>{1});

    const Graph two_nbrs = testutil::make_graph(3, {{0, 1}, {0, 2}}, 2, 1);
    CHECK(degrees_with_self_loop(two_nbrs)[0] == 3);

    // K5: every node has degree 4 + self-loop.
    std::vector<std::pair<std::uint32_t, std::uint32_t>> k5;
    for (std::uint32_t u = 0; u < 5; ++u)
        for (std::uint32_t v = u + 1; v < 5; ++v) k5.emplace_back(u, v);
    const Graph complete = testutil::make_graph(5, k5, 2, 1);
    for (std::uint64_t d : degrees_with_self_loop(complete)) CHECK(d == 5);
}

TEST_CASE("generate_sbm structure") {
    SUBCASE("p_in = p_out = 0 gives an edgeless valid graph") {
        const Graph g = generate_sbm(3, 4, 0.0, 0.0, 4, 0.1, 5);
        validate_graph(g);
        CHECK(g.num_edge_entries() == 0);
        CHECK(g.labels.size() == 12);
    }
    SUBCASE("p_in = 1, p_out = 0 gives disjoint cliques") {
        const Graph g = generate_sbm(2, 4, 1.0, 0.0, 4, 0.1, 5);
        validate_graph(g);
        CHECK(g.num_edge_entries() == 2 * 4 * 3); // two K4s, both arcs
        for (std::size_t v = 0; v < 8; ++v) {
            for (std::uint32_t u : g.neighbors(v)) {
                CHECK(g.labels[u] == g.labels[v]);
            }
        }
    }
    SUBCASE("within-block density within 3 sigma of p_in") {
        const Graph g = generate_sbm(4, 100, 0.3, 0.02, 8, 1.0, 7);
        validate_graph(g);
        std::size_t within = 0;
        for (const auto& [u, v] : undirected_edges(g))
            if (g.labels[u] == g.labels[v]) ++within;
        const double pairs = 4.0 * (100.0 * 99.0 / 2.0);
        const double expect = 0.3 * pairs;
        const double sigma = std::sqrt(pairs * 0.3 * 0.7);
        CHECK(std::fabs(static_cast<double>(within) - expect) <= 3.0 * sigma);
    }
    SUBCASE("deterministic per seed") {
        const Graph a = generate_sbm(2, 20, 0.3, 0.05, 4, 1.0, 11);
        const Graph b = generate_sbm(2, 20, 0.3, 0.05, 4, 1.0, 11);
        CHECK(a.csr_targets == b.csr_targets);
        CHECK(bits_equal(a.features, b.features));
    }
    SUBCASE("parameter validation") {
        CHECK_THROWS_AS(generate_sbm(2, 4, 0.1, 0.5, 4, 0.1, 1), ParameterError);
        CHECK_THROWS_AS(generate_sbm(4, 4, 0.5, 0.1, 2, 0.1, 1), ParameterError);
    }
}

TEST_CASE("undirected constructions store both arcs") {
    const Graph g = generate_sbm(2, 10, 0.4, 0.1, 4, 0.5, 3);
    CHECK(is_undirected(g));
}

TEST_CASE("disjoint_label_split") {
    SUBCASE("two classes split into one each") {
        const Graph g = generate_sbm(2, 10, 0.3, 0.1, 4, 0.5, 1);
        const DisjointLabelSplit d = disjoint_label_split(g, 1);
        for (std::size_t v = 0; v < g.num_nodes; ++v) {
            if (g.labels[v] == 0) {
                CHECK(d.task_a.graph.labels[v] == 0);
                CHECK(d.task_b.graph.labels[v] == -1);
            } else {
                CHECK(d.task_a.graph.labels[v] == -1);
                CHECK(d.task_b.graph.labels[v] == 0);
            }
        }
    }
    SUBCASE("four classes, 100-node blocks: 200 labeled per task, labels {0,1}") {
        const Graph g = generate_sbm(4, 100, 0.1, 0.01, 8, 0.5, 2);
        const DisjointLabelSplit d = disjoint_label_split(g, 2);
        for (const TaskView* task : {&d.task_a, &d.task_b}) {
            std::size_t labeled = 0;
            for (std::int32_t l : task->graph.labels) {
                if (l >= 0) {
                    ++labeled;
                    CHECK(l <= 1);
                }
            }
            CHECK(labeled == 200);
            CHECK(task->split.num_classes == 2);
            CHECK(task->split.train.size() == 120);
            CHECK(task->split.val.size() == 40);
            CHECK(task->split.test.size() == 40);
            validate_node_split(task->split, g.num_nodes);
        }
    }
    SUBCASE("label multiset union matches the original") {
        const Graph g = generate_sbm(5, 40, 0.2, 0.02, 8, 0.5, 3);
        const DisjointLabelSplit d = disjoint_label_split(g, 3);
        // Odd class count: task A gets 3 classes, task B gets 2.
        std::vector<std::size_t> original(5, 0), recovered(5, 0);
        for (std::int32_t l : g.labels) ++original[static_cast<std::size_t>(l)];
        for (std::size_t v = 0; v < g.num_nodes; ++v) {
            if (d.task_a.graph.labels[v] >= 0)
                ++recovered[static_cast<std::size_t>(d.task_a.graph.labels[v])];
            if (d.task_b.graph.labels[v] >= 0)
                ++recovered[3 + static_cast<std::size_t>(d.task_b.graph.labels[v])];
            // Disjoint labeled sets
            CHECK((d.task_a.graph.labels[v] < 0 || d.task_b.graph.labels[v] < 0));
        }
        CHECK(original == recovered);
    }
    SUBCASE("single class rejected") {
        const Graph g = generate_sbm(1, 10, 0.3, 0.0, 4, 0.5, 1);
        CHECK_THROWS_AS(disjoint_label_split(g, 1), ParameterError);
    }
}

TEST_CASE("link_split") {
    SUBCASE("10 edges partition 7/1/2") {
        // A 10-edge cycle on 10 nodes.
        std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
        for (std::uint32_t v = 0; v < 10; ++v) edges.emplace_back(v, (v + 1) % 10);
        const Graph g = testutil::make_graph(10, edges, 2, 9);
        const EdgeSplit s = link_split(g, 1);
        CHECK(s.train.pos.size() == 7);
        CHECK(s.val.pos.size() == 1);
        CHECK(s.test.pos.size() == 2);
        CHECK(s.train.neg.size() == 7);
        CHECK(s.val.neg.size() == 1);
        CHECK(s.test.neg.size() == 2);
        validate_edge_split(s, g);
    }
    SUBCASE("negatives are never edges (exhaustive)") {
        const Graph g = testutil::random_graph(20, 0.3, 2, 10);
        if (undirected_edges(g).size() >= 10) {
            const EdgeSplit s = link_split(g, 2);
            std::set<std::pair<std::uint32_t, std::uint32_t>> edge_set;
            for (const auto& e : undirected_edges(g)) edge_set.insert(e);
            for (const auto* part : {&s.train, &s.val, &s.test}) {
                for (auto [u, v] : part->neg) {
                    if (u > v) std::swap(u, v);
                    CHECK(edge_set.count({u, v}) == 0);
                }
            }
            validate_edge_split(s, g);
        }
    }
    SUBCASE("identical seeds give identical splits") {
        const Graph g = testutil::random_graph(30, 0.2, 2, 11);
        const EdgeSplit a = link_split(g, 5);
        const EdgeSplit b = link_split(g, 5);
        CHECK(a.train.pos == b.train.pos);
        CHECK(a.test.neg == b.test.neg);
    }
    SUBCASE("too few edges rejected") {
        const Graph g = testutil::make_graph(5, {{0, 1}, {1, 2}}, 2, 1);
        CHECK_THROWS_AS(link_split(g, 1), ParameterError);
    }
}

TEST_CASE("split json round-trips") {
    const Graph g = generate_sbm(2, 30, 0.3, 0.05, 4, 0.5, 21);
    const DisjointLabelSplit d = disjoint_label_split(g, 21);
    const std::string npath = tmp_path("split.json");
    save_node_split(d.task_a.split, npath);
    CHECK(split_file_kind(npath) == "node");
    const NodeSplit ns = load_node_split(npath);
    CHECK(ns.train == d.task_a.split.train);
    CHECK(ns.num_classes == d.task_a.split.num_classes);

    const EdgeSplit es = link_split(g, 3);
    const std::string epath = tmp_path("esplit.json");
    save_edge_split(es, epath);
    CHECK(split_file_kind(epath) == "link");
    const EdgeSplit back = load_edge_split(epath);
    CHECK(back.train.pos == es.train.pos);
    CHECK(back.val.neg == es.val.neg);
}
