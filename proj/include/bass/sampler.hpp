#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "bass/graph.hpp"

namespace bass {

/// Union of collision-free subsets scheduled together, with its effective
/// topology (base edges whose endpoints are both scheduled).
struct Candidate {
    std::vector<int> subset_indices;  ///< indices into the Partition, ascending
    std::vector<int> nodes;           ///< scheduled nodes, ascending
    std::vector<Edge> edges;          ///< effective edges, sorted
    Matrix adjacency;                 ///< Q A Q

    /// Transmission slots: one per scheduled subset.
    int cost() const { return static_cast<int>(subset_indices.size()); }
    int node_count() const { return static_cast<int>(adjacency.rows()); }
};

struct CandidateSet {
    std::vector<Candidate> candidates;
    int budget = 0;

    int size() const { return static_cast<int>(candidates.size()); }
    std::vector<int> costs() const;
};

/// Masks the adjacency to rows/columns of `active_nodes`.
Matrix effective_adjacency(const Graph& g, std::span<const int> active_nodes);

Candidate make_candidate(const Graph& g, const Partition& p, std::vector<int> subset_indices);

/// Every combination of exactly `budget` subsets, lexicographic in subset indices.
CandidateSet enumerate_candidates(const Graph& g, const Partition& p, int budget);

/// D_r - A_r: PSD, zero row sums, zero rows for unscheduled nodes.
Matrix candidate_laplacian(const Candidate& c);

/// n x |edges| incidence matrix, +1 at the lower endpoint and -1 at the upper.
/// Throws std::invalid_argument for an edge that is not in `g`.
Matrix incidence_matrix(const Graph& g, std::span<const Edge> edges);

/// B diag(alpha) Bᵀ. Throws std::invalid_argument on a negative weight.
Matrix weighted_laplacian(const Matrix& incidence, const Vector& alpha);

/// `keep` candidates drawn uniformly without replacement whose union of edges
/// connects all nodes. Retries up to `kMaxPruneAttempts` draws, then throws
/// std::runtime_error.
CandidateSet prune_candidates(const CandidateSet& cs, int keep, std::uint64_t seed);

inline constexpr int kMaxPruneAttempts = 1000;

/// Lookup-table form: the list of subset-index lists.
nlohmann::json candidates_to_json(const CandidateSet& cs);
CandidateSet candidates_from_json(const nlohmann::json& j, const Graph& g, const Partition& p);

long long binomial(int n, int k);

}  // namespace bass
