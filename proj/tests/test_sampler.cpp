#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "bass/sampler.hpp"
#include "bass/topology.hpp"
#include "oracles.hpp"

using namespace bass;

namespace {

// q singleton subsets on an edgeless graph: only the subset count matters.
Partition free_partition(int q, Graph& g) {
    g = Graph(q, {});
    return oracle::singletons(q);
}

}  // namespace

TEST_CASE("enumerate_candidates counts") {
    Graph g;
    SUBCASE("q=8, budget 4") {
        const Partition p = free_partition(8, g);
        CHECK(enumerate_candidates(g, p, 4).size() == 70);
    }
    SUBCASE("full budget is one candidate covering all nodes") {
        const Graph p3 = oracle::path(3);
        const Partition p = collision_free_partition(p3);
        const CandidateSet cs = enumerate_candidates(p3, p, p.count());
        REQUIRE(cs.size() == 1);
        CHECK(cs.candidates[0].nodes == std::vector<int>{0, 1, 2});
        CHECK(cs.candidates[0].adjacency == p3.adjacency());
    }
    SUBCASE("combinatorial oracle up to q=12") {
        for (int q = 1; q <= 12; ++q) {
            const Partition p = free_partition(q, g);
            for (int b = 1; b <= q; ++b) {
                const CandidateSet cs = enumerate_candidates(g, p, b);
                CHECK(cs.size() == oracle::count_combinations(q, b));
                CHECK(binomial(q, b) == cs.size());
                for (const auto& c : cs.candidates) CHECK(c.cost() == b);
            }
        }
    }
    SUBCASE("budget out of range") {
        const Partition p = free_partition(3, g);
        CHECK_THROWS_AS(enumerate_candidates(g, p, 0), std::invalid_argument);
        CHECK_THROWS_AS(enumerate_candidates(g, p, 4), std::invalid_argument);
    }
}

TEST_CASE("candidate on P3") {
    const Graph g = oracle::path(3);
    const Partition p = oracle::singletons(3);
    const CandidateSet cs = enumerate_candidates(g, p, 2);
    REQUIRE(cs.size() == 3);
    const Candidate& c = cs.candidates[0];
    CHECK(c.subset_indices == std::vector<int>{0, 1});
    Matrix a = Matrix::Zero(3, 3);
    a(0, 1) = a(1, 0) = 1.0;
    CHECK(c.adjacency == a);
    CHECK(c.edges == std::vector<Edge>{{0, 1}});
    Matrix l(3, 3);
    l << 1, -1, 0, -1, 1, 0, 0, 0, 0;
    CHECK(candidate_laplacian(c) == l);
}

TEST_CASE("effective_adjacency") {
    const Graph k2 = oracle::complete(2);
    const std::vector<int> both{0, 1}, one{0};
    CHECK(effective_adjacency(k2, both) == k2.adjacency());
    CHECK(effective_adjacency(k2, one) == Matrix::Zero(2, 2));

    const Graph p3 = oracle::path(3);
    Matrix expected = Matrix::Zero(3, 3);
    expected(0, 1) = expected(1, 0) = 1.0;
    CHECK(effective_adjacency(p3, both) == expected);

    // masking: nonzero entries only between active nodes on base edges
    Rng rng(5);
    for (int t = 0; t < 30; ++t) {
        const Graph g = oracle::random_graph(rng, 10);
        const Partition p = collision_free_partition(g);
        const int b = std::max(1, p.count() / 2);
        for (const auto& c : enumerate_candidates(g, p, b).candidates) {
            const Matrix a = g.adjacency();
            for (int i = 0; i < 10; ++i) {
                for (int j = 0; j < 10; ++j) {
                    if (c.adjacency(i, j) == 0.0) continue;
                    CHECK(a(i, j) == 1.0);
                    CHECK(std::binary_search(c.nodes.begin(), c.nodes.end(), i));
                    CHECK(std::binary_search(c.nodes.begin(), c.nodes.end(), j));
                }
            }
        }
    }
}

TEST_CASE("candidate without edges") {
    const Graph g = oracle::path(3);
    const Partition p = collision_free_partition(g);
    // node 1 alone has no scheduled neighbor
    std::vector<int> only;
    for (int k = 0; k < p.count(); ++k)
        if (p.subsets[k] == std::vector<int>{1}) only.push_back(k);
    REQUIRE(only.size() == 1);
    const Candidate c = make_candidate(g, p, only);
    CHECK(c.edges.empty());
    CHECK(candidate_laplacian(c) == Matrix::Zero(3, 3));
}

TEST_CASE("incidence_matrix") {
    const Graph k2 = oracle::complete(2);
    const std::vector<Edge> e{{0, 1}};
    const Matrix b = incidence_matrix(k2, e);
    REQUIRE(b.cols() == 1);
    CHECK(b(0, 0) == 1.0);
    CHECK(b(1, 0) == -1.0);
    CHECK(b * b.transpose() == laplacian(k2));

    const Graph p3 = oracle::path(3);
    CHECK(incidence_matrix(p3, p3.edges()) * incidence_matrix(p3, p3.edges()).transpose() == laplacian(p3));

    const Matrix empty = incidence_matrix(p3, std::vector<Edge>{});
    CHECK(empty.rows() == 3);
    CHECK(empty.cols() == 0);
    CHECK(empty * empty.transpose() == Matrix::Zero(3, 3));

    const std::vector<Edge> missing{{0, 2}};
    CHECK_THROWS_AS(incidence_matrix(p3, missing), std::invalid_argument);

    Rng rng(7);
    for (int t = 0; t < 50; ++t) {
        const int n = 2 + static_cast<int>(uniform01(rng) * 7);
        const Graph g = oracle::random_graph(rng, n);
        const Matrix inc = incidence_matrix(g, g.edges());
        CHECK(inc * inc.transpose() == oracle::dense_laplacian(g.adjacency()));
    }
}

TEST_CASE("weighted_laplacian") {
    const Graph k2 = oracle::complete(2);
    const Matrix b = incidence_matrix(k2, k2.edges());
    CHECK(weighted_laplacian(b, Vector::Ones(1)) == laplacian(k2));
    CHECK(weighted_laplacian(b, Vector::Zero(1)) == Matrix::Zero(2, 2));
    CHECK_THROWS_AS(weighted_laplacian(b, -Vector::Ones(1)), std::invalid_argument);

    const Graph p3 = oracle::path(3);
    Vector alpha(2);
    alpha << 2, 3;
    const Matrix l = weighted_laplacian(incidence_matrix(p3, p3.edges()), alpha);
    Matrix expected(3, 3);
    expected << 2, -2, 0, -2, 5, -3, 0, -3, 3;
    CHECK(l == expected);
    CHECK((l * Vector::Ones(3)).cwiseAbs().maxCoeff() == 0.0);

    Rng rng(11);
    for (int t = 0; t < 30; ++t) {
        const Graph g = oracle::random_graph(rng, 12);
        Vector w(static_cast<Eigen::Index>(g.edges().size()));
        for (auto& v : w) v = 5.0 * uniform01(rng);
        const Matrix wl = weighted_laplacian(incidence_matrix(g, g.edges()), w);
        Eigen::SelfAdjointEigenSolver<Matrix> es(wl, Eigen::EigenvaluesOnly);
        CHECK(es.eigenvalues()(0) >= -1e-10);
    }
}

TEST_CASE("prune_candidates") {
    const Graph g = oracle::path(3);
    const Partition p = oracle::singletons(3);
    const CandidateSet cs = enumerate_candidates(g, p, 2);

    const CandidateSet same = prune_candidates(cs, cs.size(), 1);
    REQUIRE(same.size() == cs.size());
    for (int r = 0; r < cs.size(); ++r) CHECK(same.candidates[r].subset_indices == cs.candidates[r].subset_indices);

    // any 2 of {01, 02, 12} on P3 whose edges connect the path
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const CandidateSet kept = prune_candidates(cs, 2, seed);
        REQUIRE(kept.size() == 2);
        Matrix u = Matrix::Zero(3, 3);
        for (const auto& c : kept.candidates) u += c.adjacency;
        CHECK(oracle::bfs_connected(u));
    }

    CHECK_THROWS_AS(prune_candidates(cs, 1, 1), std::runtime_error);
    CHECK_THROWS_AS(prune_candidates(cs, 0, 1), std::invalid_argument);
}

TEST_CASE("candidate JSON round trip") {
    const Graph g = generate_topology(TopologyKind::two_stars, 9, 0.0, 1);
    const Partition p = collision_free_partition(g);
    const CandidateSet cs = enumerate_candidates(g, p, 3);
    const CandidateSet back = candidates_from_json(candidates_to_json(cs), g, p);
    REQUIRE(back.size() == cs.size());
    CHECK(back.budget == cs.budget);
    for (int r = 0; r < cs.size(); ++r) {
        CHECK(back.candidates[r].subset_indices == cs.candidates[r].subset_indices);
        CHECK(back.candidates[r].adjacency == cs.candidates[r].adjacency);
    }
}
