#pragma once

#include <optional>
#include <span>

#include <json.hpp>

#include "bass/graph.hpp"
#include "bass/spectral.hpp"

namespace bass {

/// Centrality-driven subset scheduling with one common link weight.
struct HeuristicPolicy {
    Vector subset_probs;  ///< one activation probability per collision-free subset
    Vector node_probs;    ///< probability of the subset each node belongs to
    double epsilon = 0.0;
    Matrix expected_laplacian;
    Matrix expected_gram;  ///< E[L̃ᵀ L̃]
    double rho = 0.0;
    int budget = 0;
};

/// p_k = min{1, gamma (b_k + floor)}, b_k the summed centrality of subset k,
/// with gamma chosen so the probabilities sum to `budget`. The floor defaults
/// to 1/q. Throws std::invalid_argument unless 0 < budget <= q.
Vector heuristic_probs(const Partition& p, std::span<const double> centrality, double budget,
                       std::optional<double> floor = std::nullopt);

/// Expands subset probabilities to per-node probabilities.
Vector node_probabilities(const Partition& p, const Vector& subset_probs, int n);

/// E[L̃] for independent subset activations. Throws std::invalid_argument if a
/// probability falls outside [0, 1].
Matrix expected_laplacian(const Graph& g, const Partition& p, const Vector& node_probs);

/// E[L̃ᵀ L̃] as diag²-term - diag·A term - A·diag term + A² term, rows computed
/// in parallel.
Matrix expected_laplacian_gram(const Graph& g, const Partition& p, const Vector& node_probs);

/// Link weight minimizing lambda_max(I - 2 eps E[L̃] + eps^2 E[L̃ᵀL̃] - J).
EpsilonSolution heuristic_epsilon(const Matrix& expected_laplacian, const Matrix& expected_gram);

/// Betweenness -> subset probabilities -> expectations -> link weight.
HeuristicPolicy build_heuristic_policy(const Graph& g, const Partition& p, int budget,
                                       std::optional<double> floor = std::nullopt);

nlohmann::json heuristic_to_json(const HeuristicPolicy& hp);

namespace reference {

/// Dense triple loops over the closed-form entries, single-threaded.
Matrix expected_laplacian(const Graph& g, const Partition& p, const Vector& node_probs);
Matrix expected_laplacian_gram(const Graph& g, const Partition& p, const Vector& node_probs);

}  // namespace reference

}  // namespace bass
