#include "bass/heuristic.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

#include "bass/centrality.hpp"

namespace bass {

namespace {

void require_probabilities(const Vector& node_probs, int n) {
    if (node_probs.size() != n) {
        throw std::invalid_argument("expected Laplacian: need one probability per node");
    }
    if (n > 0 && (node_probs.minCoeff() < 0.0 || node_probs.maxCoeff() > 1.0 || !node_probs.allFinite())) {
        throw std::invalid_argument("expected Laplacian: probabilities must lie in [0, 1]");
    }
}

// Probability that nodes i and j are both active given i is active.
inline double pair_factor(const std::vector<int>& owner, const Vector& p, int i, int j) {
    return owner[static_cast<std::size_t>(i)] == owner[static_cast<std::size_t>(j)] ? 1.0 : p(j);
}

// Probability that m is active given i and j are.
inline double triple_factor(const std::vector<int>& owner, const Vector& p, int i, int j, int m) {
    const int sm = owner[static_cast<std::size_t>(m)];
    return (sm == owner[static_cast<std::size_t>(i)] || sm == owner[static_cast<std::size_t>(j)]) ? 1.0 : p(m);
}

}  // namespace

Vector heuristic_probs(const Partition& p, std::span<const double> centrality, double budget,
                       std::optional<double> floor) {
    const int q = p.count();
    if (!(budget > 0.0) || budget > q) {
        throw std::invalid_argument("heuristic_probs: budget " + std::to_string(budget) + " outside (0, " +
                                    std::to_string(q) + "]");
    }
    const double delta = floor.value_or(1.0 / q);
    Vector score(q);
    for (int k = 0; k < q; ++k) {
        double s = delta;
        for (int i : p.subsets[static_cast<std::size_t>(k)]) {
            if (i < 0 || i >= static_cast<int>(centrality.size())) {
                throw std::invalid_argument("heuristic_probs: centrality vector too short");
            }
            s += centrality[static_cast<std::size_t>(i)];
        }
        score(k) = s;
    }
    if (score.minCoeff() <= 0.0) {
        throw std::invalid_argument("heuristic_probs: every subset needs a positive score; raise the floor");
    }
    if (budget >= q) return Vector::Ones(q);

    // gamma -> sum_k min{1, gamma s_k} is piecewise linear and increasing.
    // Walk the breakpoints from the largest score down; with c subsets capped,
    // gamma = (budget - c) / (sum of the remaining scores).
    std::vector<int> order(static_cast<std::size_t>(q));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return score(a) > score(b); });
    double remaining = score.sum();
    double gamma = 0.0;
    for (int capped = 0; capped < q; ++capped) {
        gamma = (budget - capped) / remaining;
        const double largest_free = score(order[static_cast<std::size_t>(capped)]);
        if (gamma * largest_free <= 1.0) break;
        remaining -= largest_free;
    }
    Vector probs(q);
    for (int k = 0; k < q; ++k) probs(k) = std::min(1.0, gamma * score(k));
    return probs;
}

Vector node_probabilities(const Partition& p, const Vector& subset_probs, int n) {
    if (subset_probs.size() != p.count()) {
        throw std::invalid_argument("node_probabilities: one probability per subset required");
    }
    const auto owner = p.subset_of(n);
    Vector out(n);
    for (int i = 0; i < n; ++i) out(i) = subset_probs(owner[static_cast<std::size_t>(i)]);
    return out;
}

Matrix expected_laplacian(const Graph& g, const Partition& p, const Vector& node_probs) {
    const int n = g.size();
    require_probabilities(node_probs, n);
    const auto owner = p.subset_of(n);
    Matrix out = Matrix::Zero(n, n);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        double diag = 0.0;
        for (int j : g.neighbors(i)) {
            const double v = node_probs(i) * pair_factor(owner, node_probs, i, j);
            out(i, j) = -v;
            diag += v;
        }
        out(i, i) = diag;
    }
    return out;
}

Matrix expected_laplacian_gram(const Graph& g, const Partition& p, const Vector& node_probs) {
    const int n = g.size();
    require_probabilities(node_probs, n);
    const auto owner = p.subset_of(n);
    const Vector& pr = node_probs;
    Matrix out = Matrix::Zero(n, n);

#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) {
        const auto& ni = g.neighbors(i);
        const double pi = pr(i);
        if (pi == 0.0) continue;

        // E[(Ã1)_i^2] and the diagonal of E[Ã²]
        double diag = 0.0;
        for (int m : ni) {
            const double pm = pair_factor(owner, pr, i, m);
            diag += pi * pm;
            for (int k : ni) {
                diag += pi * pm * triple_factor(owner, pr, i, m, k);
            }
        }
        out(i, i) = diag;

        // E[diag(Ã1) Ã] and E[Ã diag(Ã1)] on base edges
        for (int j : ni) {
            const double pij = pi * pair_factor(owner, pr, i, j);
            double row = 0.0;
            for (int m : ni) row += triple_factor(owner, pr, i, j, m);
            for (int m : g.neighbors(j)) row += triple_factor(owner, pr, i, j, m);
            out(i, j) -= pij * row;
        }

        // E[Ã²] off the diagonal: paths i - m - j
        for (int m : ni) {
            for (int j : g.neighbors(m)) {
                if (j == i) continue;
                out(i, j) += pi * pair_factor(owner, pr, i, j) * triple_factor(owner, pr, i, j, m);
            }
        }
    }
    return out;
}

EpsilonSolution heuristic_epsilon(const Matrix& expected_laplacian, const Matrix& expected_gram) {
    return minimize_link_weight(expected_laplacian, expected_gram);
}

HeuristicPolicy build_heuristic_policy(const Graph& g, const Partition& p, int budget, std::optional<double> floor) {
    HeuristicPolicy hp;
    hp.budget = budget;
    const auto b = betweenness(g);
    hp.subset_probs = heuristic_probs(p, b, budget, floor);
    hp.node_probs = node_probabilities(p, hp.subset_probs, g.size());
    hp.expected_laplacian = expected_laplacian(g, p, hp.node_probs);
    hp.expected_gram = expected_laplacian_gram(g, p, hp.node_probs);
    const auto sol = heuristic_epsilon(hp.expected_laplacian, hp.expected_gram);
    hp.epsilon = sol.epsilon;
    const int n = g.size();
    const Matrix second_moment = Matrix::Identity(n, n) - 2.0 * hp.epsilon * hp.expected_laplacian +
                                 hp.epsilon * hp.epsilon * hp.expected_gram - averaging_matrix(n);
    hp.rho = symmetric_norm(second_moment);
    return hp;
}

nlohmann::json heuristic_to_json(const HeuristicPolicy& hp) {
    nlohmann::json j;
    j["budget"] = hp.budget;
    j["subset_probs"] = std::vector<double>(hp.subset_probs.data(), hp.subset_probs.data() + hp.subset_probs.size());
    j["epsilon"] = hp.epsilon;
    j["rho"] = hp.rho;
    return j;
}

namespace reference {

Matrix expected_laplacian(const Graph& g, const Partition& p, const Vector& node_probs) {
    const int n = g.size();
    require_probabilities(node_probs, n);
    const auto owner = p.subset_of(n);
    const Matrix a = g.adjacency();
    Matrix out = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) {
                for (int m = 0; m < n; ++m) out(i, i) += node_probs(i) * pair_factor(owner, node_probs, i, m) * a(i, m) * a(m, i);
            } else {
                out(i, j) = -node_probs(i) * pair_factor(owner, node_probs, i, j) * a(i, j);
            }
        }
    }
    return out;
}

Matrix expected_laplacian_gram(const Graph& g, const Partition& p, const Vector& node_probs) {
    const int n = g.size();
    require_probabilities(node_probs, n);
    const auto owner = p.subset_of(n);
    const Matrix a = g.adjacency();
    const Vector& pr = node_probs;
    Matrix degree_sq = Matrix::Zero(n, n);
    Matrix degree_left = Matrix::Zero(n, n);
    Matrix degree_right = Matrix::Zero(n, n);
    Matrix square = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int m = 0; m < n; ++m) {
            for (int k = 0; k < n; ++k) {
                degree_sq(i, i) += pr(i) * pair_factor(owner, pr, i, m) * triple_factor(owner, pr, i, m, k) * a(i, m) * a(i, k);
            }
            square(i, i) += pr(i) * pair_factor(owner, pr, i, m) * a(i, m);
        }
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const double pij = pr(i) * pair_factor(owner, pr, i, j);
            for (int m = 0; m < n; ++m) {
                const double t = pij * triple_factor(owner, pr, i, j, m);
                degree_left(i, j) += t * a(i, j) * a(i, m);
                degree_right(i, j) += t * a(i, j) * a(j, m);
                square(i, j) += t * a(i, m) * a(m, j);
            }
        }
    }
    return degree_sq - degree_left - degree_right + square;
}

}  // namespace reference

}  // namespace bass
