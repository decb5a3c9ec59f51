#include <catch2/catch_amalgamated.hpp>

#include "matchgate/plane_graph.hpp"
#include "matchgate/realize.hpp"
#include "matchgate/signature.hpp"
#include "support/generators.hpp"

using namespace matchgate;

namespace {

PlaneGraph cycle_graph(int n) {
    PlaneGraph g;
    for (int v = 1; v <= n; ++v) g.add_node(v);
    for (int v = 1; v <= n; ++v) {
        int next = v == n ? 1 : v + 1;
        g.add_edge(v, next, GaussianRational(1));
        g.rotation[v] = {v == 1 ? n : v - 1, next};
    }
    g.outer = Dart{1, 2};
    return g;
}

PlaneGraph single_edge(GaussianRational w = GaussianRational(1)) {
    PlaneGraph g;
    g.add_node(1);
    g.add_node(2);
    g.add_edge(1, 2, std::move(w));
    g.rotation[1] = {2};
    g.rotation[2] = {1};
    g.outer = Dart{1, 2};
    g.externals = {1, 2};
    return g;
}

}  // namespace

TEST_CASE("face walks", "[planegraph]") {
    SECTION("triangle has two length-3 walks") {
        PlaneGraph g = cycle_graph(3);
        g.validate();
        FaceSet fs = faces(g);
        REQUIRE(fs.walks.size() == 2);
        REQUIRE(fs.walks[0].size() == 3);
        REQUIRE(fs.walks[1].size() == 3);
    }
    SECTION("a single edge is one walk with both darts") {
        PlaneGraph g = single_edge();
        FaceSet fs = faces(g);
        REQUIRE(fs.walks.size() == 1);
        REQUIRE(fs.walks[0].size() == 2);
    }
    SECTION("crossover gadget has three faces") {
        FaceSet fs = faces(crossover_gadget());
        REQUIRE(fs.walks.size() == 3);
    }
    SECTION("every dart appears exactly once") {
        testsupport::Rng rng(11);
        for (int trial = 0; trial < 30; ++trial) {
            PlaneGraph g = testsupport::random_plane_matchgate(rng);
            FaceSet fs = faces(g);
            std::size_t darts = 0;
            for (const auto& walk : fs.walks) darts += walk.size();
            REQUIRE(darts == 2 * g.edges.size());
        }
    }
}

TEST_CASE("validation rejects broken graphs", "[planegraph]") {
    SECTION("zero weight edge") {
        PlaneGraph g = single_edge(GaussianRational(0));
        REQUIRE_THROWS_AS(g.validate(), EmbeddingError);
    }
    SECTION("rotation does not match incidences") {
        PlaneGraph g = single_edge();
        g.rotation[1] = {};
        REQUIRE_THROWS_AS(g.validate(), EmbeddingError);
    }
    SECTION("K5 admits no plane embedding") {
        PlaneGraph g;
        for (int v = 1; v <= 5; ++v) g.add_node(v);
        for (int u = 1; u <= 5; ++u) {
            std::vector<int> rot;
            for (int v = 1; v <= 5; ++v) {
                if (u == v) continue;
                if (u < v) g.add_edge(u, v, GaussianRational(1));
                rot.push_back(v);
            }
            g.rotation[u] = rot;
        }
        g.outer = Dart{1, 2};
        REQUIRE_THROWS_AS(g.validate(), EmbeddingError);
    }
    SECTION("externals out of clockwise order") {
        PlaneGraph g = cycle_graph(4);
        g.externals = {1, 3, 2};
        REQUIRE_THROWS_AS(g.validate(), EmbeddingError);
        g.externals = {3, 4, 1};  // a cyclic rotation is fine
        g.validate();
    }
    SECTION("interior external rejected") {
        PlaneGraph g = cycle_graph(4);
        // Pendant inside the inner face; it is not on the outer walk.
        insert_at_corner(g, 1, 2, 5);
        g.add_node(5);
        g.rotation[5] = {1};
        g.add_edge(1, 5, GaussianRational(1));
        g.externals = {5};
        REQUIRE_THROWS_AS(g.validate(), EmbeddingError);
    }
}

TEST_CASE("remove_externals", "[planegraph]") {
    SECTION("all-zero pattern is the identity") {
        PlaneGraph g = crossover_gadget();
        PlaneGraph h = remove_externals(g, RemovalPattern::from_string("0000"));
        REQUIRE(h.nodes == g.nodes);
        REQUIRE(h.edges == g.edges);
        REQUIRE(h.externals == g.externals);
    }
    SECTION("single edge with one end removed leaves an isolated node") {
        PlaneGraph g = single_edge();
        PlaneGraph h = remove_externals(g, RemovalPattern::from_string("10"));
        REQUIRE(h.nodes == std::vector<int>{2});
        REQUIRE(h.edges.empty());
        REQUIRE_FALSE(h.outer.has_value());
    }
    SECTION("crossover 1010 leaves the inner path") {
        PlaneGraph h = remove_externals(crossover_gadget(), RemovalPattern::from_string("1010"));
        REQUIRE(h.nodes.size() == 4);
        REQUIRE(h.edges.size() == 3);
    }
    SECTION("removal composes like the bitwise or") {
        testsupport::Rng rng(23);
        for (int trial = 0; trial < 40; ++trial) {
            PlaneGraph g = testsupport::random_plane_matchgate(rng);
            const int k = g.arity();
            if (k == 0) continue;
            std::uint32_t a = static_cast<std::uint32_t>(rng()) & (((std::uint32_t)1 << k) - 1);
            std::uint32_t b = static_cast<std::uint32_t>(rng()) & (((std::uint32_t)1 << k) - 1);
            PlaneGraph once = remove_externals(g, RemovalPattern::from_index(k, a | b));

            PlaneGraph first = remove_externals(g, RemovalPattern::from_index(k, a));
            // Express b on the surviving externals of `first`.
            RemovalPattern rest{first.arity(), 0};
            int pos = 1;
            for (int i = 1; i <= k; ++i) {
                if (a >> (k - i) & 1) continue;
                if (b >> (k - i) & 1) rest.bits |= (std::uint32_t)1 << (rest.arity - pos);
                ++pos;
            }
            PlaneGraph twice = remove_externals(first, rest);
            REQUIRE(once.nodes == twice.nodes);
            REQUIRE(once.edges == twice.edges);
            REQUIRE(once.externals == twice.externals);
        }
    }
}

TEST_CASE("preprocess", "[planegraph]") {
    SECTION("pendant paths and relabeling for arity 5") {
        testsupport::Rng rng(5);
        PlaneGraph g;
        do {
            g = testsupport::random_plane_matchgate(rng, {5, 5, false});
        } while (g.arity() != 5);
        PlaneGraph p = preprocess(g);
        REQUIRE(p.externals == std::vector<int>({1, 2, 3, 4, 5}));
        for (int i = 1; i <= 5; ++i) {
            REQUIRE(p.degree(i) == 1);
            REQUIRE(p.neighbors(i) == std::vector<int>{2 * 5 + 1 - i});
        }
        REQUIRE(is_connected(p));
        REQUIRE(signature(p) == signature(g));
    }
    SECTION("two disjoint edges become one connected gadget, signature kept") {
        PlaneGraph a = single_edge(GaussianRational(mpq_class(2), mpq_class(1)));
        PlaneGraph b = single_edge(GaussianRational(mpq_class(0), mpq_class(3)));
        std::map<int, int> shift{{1, 3}, {2, 4}};
        PlaneGraph g = merge_disjoint(a, relabel_nodes(b, shift));
        REQUIRE(components(g).size() == 2);
        PlaneGraph p = preprocess(g);
        REQUIRE(is_connected(p));
        REQUIRE(signature(p) == signature(g));
        REQUIRE(p.arity() == 4);
    }
    SECTION("already preprocessed graphs keep their signature") {
        testsupport::Rng rng(99);
        PlaneGraph g = testsupport::random_plane_matchgate(rng);
        PlaneGraph p = preprocess(g);
        REQUIRE(signature(preprocess(p)) == signature(g));
    }
}

TEST_CASE("components", "[planegraph]") {
    REQUIRE(is_connected(cycle_graph(3)));
    PlaneGraph empty;
    REQUIRE(components(empty).empty());
    PlaneGraph two = merge_disjoint(single_edge(), relabel_nodes(single_edge(), {{1, 3}, {2, 4}}));
    REQUIRE(components(two).size() == 2);
}
