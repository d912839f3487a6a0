#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "bass/centrality.hpp"
#include "bass/heuristic.hpp"
#include "bass/topology.hpp"
#include "oracles.hpp"

using namespace bass;

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

// Scalar bisection for gamma in sum_k min(1, gamma s_k) = budget.
Vector bisection_probs(const Vector& score, double budget) {
    double lo = 0.0, hi = 1.0 / score.minCoeff();
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (score.unaryExpr([&](double s) { return std::min(1.0, mid * s); }).sum() < budget)
            lo = mid;
        else
            hi = mid;
    }
    return score.unaryExpr([&](double s) { return std::min(1.0, hi * s); });
}

}  // namespace

TEST_CASE("heuristic_probs") {
    SUBCASE("equal scores split the budget evenly") {
        const Partition p = oracle::singletons(6);
        const std::vector<double> b(6, 2.0);
        const Vector probs = heuristic_probs(p, b, 3);
        for (int k = 0; k < 6; ++k) CHECK(probs(k) == doctest::Approx(0.5));
    }
    SUBCASE("full budget activates everything") {
        const Partition p = oracle::singletons(4);
        const std::vector<double> b{0, 3, 1, 0};
        CHECK(heuristic_probs(p, b, 4) == Vector::Ones(4));
    }
    SUBCASE("P3 caps the middle subset first") {
        const Partition p = oracle::singletons(3);
        const std::vector<double> b{0, 1, 0};
        const Vector probs = heuristic_probs(p, b, 2);
        CHECK(probs.sum() == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(probs(1) == 1.0);
        CHECK(probs(0) == doctest::Approx(0.5));
        CHECK(probs(2) == doctest::Approx(probs(0)));
        Vector score(3);
        score << 1.0 / 3, 1 + 1.0 / 3, 1.0 / 3;
        CHECK(max_abs(probs - bisection_probs(score, 2)) <= 1e-10);
    }
    SUBCASE("sum and range on random graphs") {
        Rng rng(41);
        for (int t = 0; t < 40; ++t) {
            const Graph g = oracle::random_graph(rng, 12);
            const Partition p = collision_free_partition(g);
            const auto b = betweenness(g);
            const double budget = 1 + uniform01(rng) * (p.count() - 1);
            const Vector probs = heuristic_probs(p, b, budget);
            CHECK(std::abs(probs.sum() - budget) <= 1e-10);
            CHECK(probs.minCoeff() >= 0.0);
            CHECK(probs.maxCoeff() <= 1.0);
            Vector score(p.count());
            for (int k = 0; k < p.count(); ++k) {
                score(k) = 1.0 / p.count();
                for (int i : p.subsets[k]) score(k) += b[i];
            }
            CHECK(max_abs(probs - bisection_probs(score, budget)) <= 1e-9);
        }
    }
    SUBCASE("budget out of range") {
        const Partition p = oracle::singletons(3);
        const std::vector<double> b(3, 1.0);
        CHECK_THROWS_AS(heuristic_probs(p, b, 0.0), std::invalid_argument);
        CHECK_THROWS_AS(heuristic_probs(p, b, 4.0), std::invalid_argument);
    }
}

TEST_CASE("expected_laplacian") {
    const Graph k2 = oracle::complete(2);
    const Partition p = oracle::singletons(2);
    const Vector half = Vector::Constant(2, 0.5);
    CHECK(max_abs(expected_laplacian(k2, p, half) - 0.25 * laplacian(k2)) <= 1e-15);

    Rng rng(43);
    const Graph g = oracle::random_graph(rng, 10);
    const Partition pg = collision_free_partition(g);
    CHECK(expected_laplacian(g, pg, Vector::Ones(10)) == laplacian(g));
    CHECK(expected_laplacian(g, pg, Vector::Zero(10)) == Matrix::Zero(10, 10));
    CHECK_THROWS_AS(expected_laplacian(g, pg, Vector::Constant(10, 1.5)), std::invalid_argument);
}

TEST_CASE("expected_laplacian_gram") {
    const Graph k2 = oracle::complete(2);
    const Partition p = oracle::singletons(2);
    Matrix expected(2, 2);
    expected << 0.5, -0.5, -0.5, 0.5;
    CHECK(max_abs(expected_laplacian_gram(k2, p, Vector::Constant(2, 0.5)) - expected) <= 1e-15);

    Rng rng(47);
    const Graph g = oracle::random_graph(rng, 10);
    const Partition pg = collision_free_partition(g);
    const Matrix l = laplacian(g);
    CHECK(max_abs(expected_laplacian_gram(g, pg, Vector::Ones(10)) - l.transpose() * l) <= 1e-12);
}

TEST_CASE("expectations match 2^q enumeration") {
    Rng rng(53);
    int tested = 0;
    while (tested < 25) {
        const int n = 4 + static_cast<int>(uniform01(rng) * 12);
        const Graph g = oracle::random_graph(rng, n);
        const Partition p = collision_free_partition(g);
        if (p.count() > 10) continue;
        ++tested;
        Vector sp(p.count());
        for (auto& v : sp) v = uniform01(rng);
        if (tested % 5 == 0) sp(0) = 1.0;
        const Vector np = node_probabilities(p, sp, n);
        const auto m = oracle::enumerate_moments(g, p, sp);
        CHECK(max_abs(expected_laplacian(g, p, np) - m.mean) <= 1e-10);
        const Matrix gram = expected_laplacian_gram(g, p, np);
        CHECK(max_abs(gram - m.gram) <= 1e-10);
        CHECK(max_abs(gram - gram.transpose()) <= 1e-12);
        Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
        CHECK(es.eigenvalues()(0) >= -1e-10);
    }
}

TEST_CASE("parallel expectations equal the serial reference") {
    Rng rng(59);
    for (int t = 0; t < 10; ++t) {
        const Graph g = oracle::random_graph(rng, 25);
        const Partition p = collision_free_partition(g);
        Vector sp(p.count());
        for (auto& v : sp) v = uniform01(rng);
        const Vector np = node_probabilities(p, sp, 25);
        CHECK(max_abs(expected_laplacian(g, p, np) - reference::expected_laplacian(g, p, np)) <= 1e-14);
        CHECK(max_abs(expected_laplacian_gram(g, p, np) - reference::expected_laplacian_gram(g, p, np)) <= 1e-12);
    }
}

TEST_CASE("heuristic_epsilon") {
    const Graph k2 = oracle::complete(2);
    const Partition p = oracle::singletons(2);
    SUBCASE("deterministic K2") {
        const Vector ones = Vector::Ones(2);
        const auto sol = heuristic_epsilon(expected_laplacian(k2, p, ones), expected_laplacian_gram(k2, p, ones));
        CHECK(std::abs(sol.epsilon - 0.5) <= 1e-8);
        CHECK(std::abs(sol.objective) <= 1e-8);
    }
    SUBCASE("random K2 against a grid") {
        const Vector half = Vector::Constant(2, 0.5);
        const Matrix a = expected_laplacian(k2, p, half);
        const Matrix b = expected_laplacian_gram(k2, p, half);
        const auto sol = heuristic_epsilon(a, b);
        const Matrix base = Matrix::Identity(2, 2) - averaging_matrix(2);
        const auto [x, f] = oracle::grid_min(
            [&](double e) { return lambda_max(base - 2 * e * a + e * e * b); }, 0.0, 2.0 / lambda_max(a), 1e-4);
        CHECK(sol.objective <= f + 1e-9);
        CHECK(sol.epsilon == doctest::Approx(x).epsilon(1e-3));
        CHECK(sol.epsilon > 0.0);
    }
    SUBCASE("no expected links") {
        CHECK_THROWS_AS(heuristic_epsilon(Matrix::Zero(3, 3), Matrix::Zero(3, 3)), std::invalid_argument);
    }
}

TEST_CASE("build_heuristic_policy") {
    const Graph g = generate_topology(TopologyKind::two_stars, 9, 0.0, 1);
    const Partition p = collision_free_partition(g);
    const HeuristicPolicy hp = build_heuristic_policy(g, p, 3);
    CHECK(hp.subset_probs.sum() == doctest::Approx(3.0));
    CHECK(hp.epsilon > 0.0);
    CHECK(hp.rho < 1.0);
    const auto j = heuristic_to_json(hp);
    CHECK(j["budget"] == 3);
    CHECK(j["subset_probs"].size() == static_cast<std::size_t>(p.count()));
}
