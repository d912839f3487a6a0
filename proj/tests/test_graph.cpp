#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "bass/centrality.hpp"
#include "bass/graph.hpp"
#include "bass/topology.hpp"
#include "oracles.hpp"

using namespace bass;

TEST_CASE("build_graph") {
    SUBCASE("single edge") {
        const std::vector<std::pair<int, int>> e{{0, 1}};
        const Graph g = build_graph(2, e);
        Matrix expected(2, 2);
        expected << 0, 1, 1, 0;
        CHECK(g.adjacency() == expected);
    }
    SUBCASE("path") {
        const std::vector<std::pair<int, int>> e{{0, 1}, {1, 2}};
        const Graph g = build_graph(3, e);
        CHECK(g.edges().size() == 2);
        CHECK(g.degree(1) == 2);
        CHECK(g.adjacent(0, 1));
        CHECK_FALSE(g.adjacent(0, 2));
    }
    SUBCASE("duplicates collapse") {
        const std::vector<std::pair<int, int>> dup{{0, 1}, {0, 1}, {1, 0}};
        const std::vector<std::pair<int, int>> one{{0, 1}};
        CHECK(build_graph(3, dup) == build_graph(3, one));
    }
    SUBCASE("invalid input") {
        const std::vector<std::pair<int, int>> loop{{1, 1}};
        const std::vector<std::pair<int, int>> out{{0, 3}};
        CHECK_THROWS_AS(build_graph(3, loop), std::invalid_argument);
        CHECK_THROWS_AS(build_graph(3, out), std::invalid_argument);
    }
}

TEST_CASE("graph file round trip") {
    const Graph g = oracle::cycle(5);
    std::stringstream ss;
    write_graph(ss, g);
    CHECK(read_graph(ss) == g);

    std::istringstream bad("# header\n3\n0 1\n1 x\n");
    try {
        read_graph(bad);
        FAIL("expected a parse error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("line 4") != std::string::npos);
    }
}

TEST_CASE("generate_topology") {
    SUBCASE("two stars") {
        const Graph g = generate_topology(TopologyKind::two_stars, 9, 0.0, 1);
        CHECK(g.connected());
        CHECK(g.edges().size() == 8);
        // hubs dominate every other degree
        for (int i = 2; i < 9; ++i) {
            CHECK(g.degree(0) > g.degree(i));
            CHECK(g.degree(1) > g.degree(i));
        }
        CHECK(g.adjacent(0, 2));
        CHECK(g.adjacent(1, 2));
    }
    SUBCASE("complete ER") {
        const Graph g = generate_topology(TopologyKind::erdos_renyi, 20, 1.0, 5);
        CHECK(g.edges().size() == 190);
    }
    SUBCASE("geometric connected") {
        for (std::uint64_t s = 0; s < 10; ++s) {
            const Graph g = generate_topology(TopologyKind::geometric, 16, 0.4, s);
            CHECK(oracle::bfs_connected(g.adjacency()));
            CHECK(density(g) > 0.0);
            CHECK(density(g) <= 1.0);
        }
    }
    SUBCASE("forest is a spanning tree") {
        const Graph g = generate_topology(TopologyKind::forest, 12, 0.0, 3);
        CHECK(g.connected());
        CHECK(g.edges().size() == 11);
    }
    SUBCASE("same seed, same graph") {
        CHECK(generate_topology(TopologyKind::geometric, 20, 0.35, 9) ==
              generate_topology(TopologyKind::geometric, 20, 0.35, 9));
    }
    SUBCASE("bad arguments") {
        CHECK_THROWS_AS(generate_topology(TopologyKind::geometric, 1, 0.4, 1), std::invalid_argument);
        CHECK_THROWS_AS(parse_topology_kind("ring"), std::invalid_argument);
        CHECK_THROWS_AS(generate_topology(TopologyKind::erdos_renyi, 30, 0.001, 1), std::runtime_error);
    }
}

TEST_CASE("auxiliary_graph") {
    SUBCASE("P3 becomes a triangle") {
        const Graph aux = auxiliary_graph(oracle::path(3));
        CHECK(aux == oracle::complete(3));
    }
    SUBCASE("K2 unchanged") { CHECK(auxiliary_graph(oracle::complete(2)) == oracle::complete(2)); }
    SUBCASE("star becomes complete") { CHECK(auxiliary_graph(oracle::star(3)) == oracle::complete(4)); }
    SUBCASE("matches shared-neighbor oracle") {
        Rng rng(3);
        for (int t = 0; t < 20; ++t) {
            const Graph g = oracle::random_graph(rng, 12);
            const Matrix a = g.adjacency();
            const Graph aux = auxiliary_graph(g);
            for (int i = 0; i < 12; ++i) {
                for (int j = i + 1; j < 12; ++j) {
                    bool share = a(i, j) != 0.0;
                    for (int m = 0; m < 12; ++m) share = share || (a(i, m) != 0.0 && a(j, m) != 0.0);
                    CHECK(aux.adjacent(i, j) == share);
                }
            }
        }
    }
}

TEST_CASE("greedy_coloring") {
    SUBCASE("triangle needs three colors") {
        const std::vector<int> order{0, 1, 2};
        const Partition p = greedy_coloring(oracle::complete(3), order);
        REQUIRE(p.count() == 3);
        CHECK(p.subsets[0] == std::vector<int>{0});
        CHECK(p.subsets[1] == std::vector<int>{1});
        CHECK(p.subsets[2] == std::vector<int>{2});
    }
    SUBCASE("edgeless graph is one subset") {
        const Graph g(5, {});
        const Partition p = collision_free_partition(g);
        REQUIRE(p.count() == 1);
        CHECK(p.subsets[0].size() == 5);
    }
    SUBCASE("C4 gives singletons") {
        const Partition p = collision_free_partition(oracle::cycle(4));
        CHECK(p.count() == 4);
    }
    SUBCASE("order must be a permutation") {
        const std::vector<int> bad{0, 0, 1};
        CHECK_THROWS_AS(greedy_coloring(oracle::complete(3), bad), std::invalid_argument);
    }
}

TEST_CASE("partition properties on random graphs") {
    Rng rng(17);
    for (int t = 0; t < 60; ++t) {
        const int n = 4 + static_cast<int>(uniform01(rng) * 20);
        const Graph g = oracle::random_graph(rng, n);
        const Graph aux = auxiliary_graph(g);
        for (auto order : {ColoringOrder::degree_descending, ColoringOrder::natural}) {
            const Partition p = collision_free_partition(g, order);
            CHECK(is_valid_partition(g, p));
            CHECK(p.count() <= aux.max_degree() + 1);
            std::vector<int> seen(n, 0);
            for (const auto& s : p.subsets) {
                CHECK(oracle::collision_free(g, s));
                for (int i : s) ++seen[i];
            }
            for (int c : seen) CHECK(c == 1);
        }
    }
    for (int n : {2, 5, 9}) CHECK(collision_free_partition(oracle::complete(n)).count() == n);
}

TEST_CASE("betweenness") {
    SUBCASE("P3") { CHECK(betweenness(oracle::path(3)) == std::vector<double>{0, 1, 0}); }
    SUBCASE("K4") { CHECK(betweenness(oracle::complete(4)) == std::vector<double>(4, 0.0)); }
    SUBCASE("star K1,4") {
        const auto b = betweenness(oracle::star(4));
        CHECK(b[0] == 6.0);
        for (int i = 1; i <= 4; ++i) CHECK(b[i] == 0.0);
    }
    SUBCASE("path-counting oracle on small graphs") {
        Rng rng(23);
        for (int t = 0; t < 100; ++t) {
            const int n = 2 + static_cast<int>(uniform01(rng) * 7);
            const Graph g = oracle::random_graph(rng, n);
            const auto b = betweenness(g);
            const auto expected = oracle::betweenness(g);
            for (int i = 0; i < n; ++i) CHECK(b[i] == doctest::Approx(expected[i]).epsilon(1e-12));
        }
    }
    SUBCASE("parallel equals serial") {
        Rng rng(29);
        for (int t = 0; t < 10; ++t) {
            const Graph g = oracle::random_graph(rng, 40);
            CHECK(betweenness(g) == reference::betweenness(g));
        }
    }
    SUBCASE("disconnected") {
        const Graph g(3, {});
        CHECK_THROWS_AS(betweenness(g), std::invalid_argument);
    }
}

TEST_CASE("laplacian and spectrum") {
    Matrix k2(2, 2);
    k2 << 1, -1, -1, 1;
    CHECK(laplacian(oracle::complete(2)) == k2);

    const Graph p3 = oracle::path(3);
    Matrix expected = -p3.adjacency();
    expected.diagonal() << 1, 2, 1;
    CHECK(laplacian(p3) == expected);

    CHECK(algebraic_connectivity(k2) == doctest::Approx(2.0));
    CHECK(algebraic_connectivity(laplacian(p3)) == doctest::Approx(1.0));
    CHECK(algebraic_connectivity(Matrix::Zero(4, 4)) == doctest::Approx(0.0));
    Matrix asym = Matrix::Zero(2, 2);
    asym(0, 1) = 1.0;
    CHECK_THROWS_AS(algebraic_connectivity(asym), std::invalid_argument);

    Rng rng(31);
    for (int t = 0; t < 20; ++t) {
        const Matrix l = laplacian(oracle::random_graph(rng, 15));
        CHECK((l * Vector::Ones(15)).cwiseAbs().maxCoeff() == 0.0);
        CHECK((Vector::Ones(15).transpose() * l).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("density") {
    CHECK(density(oracle::complete(4)) == 1.0);
    CHECK(density(oracle::path(3)) == doctest::Approx(4.0 / 6.0));
    CHECK(density(Graph(4, {})) == 0.0);
    CHECK_THROWS_AS(density(Graph(1, {})), std::invalid_argument);
}
