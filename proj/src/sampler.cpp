#include "bass/sampler.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

#include "bass/rng.hpp"

namespace bass {

std::vector<int> CandidateSet::costs() const {
    std::vector<int> out;
    out.reserve(candidates.size());
    for (const auto& c : candidates) out.push_back(c.cost());
    return out;
}

long long binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    long long r = 1;
    for (int i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
    }
    return r;
}

Matrix effective_adjacency(const Graph& g, std::span<const int> active_nodes) {
    const int n = g.size();
    std::vector<char> active(static_cast<std::size_t>(n), 0);
    for (int i : active_nodes) {
        if (i < 0 || i >= n) {
            throw std::invalid_argument("effective_adjacency: node " + std::to_string(i) + " out of range");
        }
        active[static_cast<std::size_t>(i)] = 1;
    }
    Matrix a = Matrix::Zero(n, n);
    for (const Edge& e : g.edges()) {
        if (active[static_cast<std::size_t>(e.u)] && active[static_cast<std::size_t>(e.v)]) {
            a(e.u, e.v) = 1.0;
            a(e.v, e.u) = 1.0;
        }
    }
    return a;
}

Candidate make_candidate(const Graph& g, const Partition& p, std::vector<int> subset_indices) {
    std::sort(subset_indices.begin(), subset_indices.end());
    Candidate c;
    for (int k : subset_indices) {
        if (k < 0 || k >= p.count()) {
            throw std::invalid_argument("candidate: subset index " + std::to_string(k) + " out of range");
        }
        const auto& s = p.subsets[static_cast<std::size_t>(k)];
        c.nodes.insert(c.nodes.end(), s.begin(), s.end());
    }
    if (std::adjacent_find(subset_indices.begin(), subset_indices.end()) != subset_indices.end()) {
        throw std::invalid_argument("candidate: repeated subset index");
    }
    std::sort(c.nodes.begin(), c.nodes.end());
    c.subset_indices = std::move(subset_indices);
    c.adjacency = effective_adjacency(g, c.nodes);
    for (const Edge& e : g.edges()) {
        if (c.adjacency(e.u, e.v) != 0.0) c.edges.push_back(e);
    }
    return c;
}

CandidateSet enumerate_candidates(const Graph& g, const Partition& p, int budget) {
    const int q = p.count();
    if (budget < 1 || budget > q) {
        throw std::invalid_argument("enumerate_candidates: budget " + std::to_string(budget) +
                                    " outside [1, " + std::to_string(q) + "]");
    }
    CandidateSet cs;
    cs.budget = budget;
    std::vector<int> pick(static_cast<std::size_t>(budget));
    std::iota(pick.begin(), pick.end(), 0);
    while (true) {
        cs.candidates.push_back(make_candidate(g, p, pick));
        int i = budget - 1;
        while (i >= 0 && pick[static_cast<std::size_t>(i)] == q - budget + i) --i;
        if (i < 0) break;
        ++pick[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < budget; ++j) {
            pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
        }
    }
    return cs;
}

Matrix candidate_laplacian(const Candidate& c) {
    Matrix l = -c.adjacency;
    l.diagonal() = c.adjacency.rowwise().sum();
    return l;
}

Matrix incidence_matrix(const Graph& g, std::span<const Edge> edges) {
    Matrix b = Matrix::Zero(g.size(), static_cast<Eigen::Index>(edges.size()));
    for (std::size_t k = 0; k < edges.size(); ++k) {
        const int u = std::min(edges[k].u, edges[k].v);
        const int v = std::max(edges[k].u, edges[k].v);
        if (u < 0 || v >= g.size() || !g.adjacent(u, v)) {
            throw std::invalid_argument("incidence_matrix: (" + std::to_string(u) + "," + std::to_string(v) +
                                        ") is not an edge of the graph");
        }
        b(u, static_cast<Eigen::Index>(k)) = 1.0;
        b(v, static_cast<Eigen::Index>(k)) = -1.0;
    }
    return b;
}

Matrix weighted_laplacian(const Matrix& incidence, const Vector& alpha) {
    if (alpha.size() != incidence.cols()) {
        throw std::invalid_argument("weighted_laplacian: weight count does not match edge count");
    }
    if (alpha.size() > 0 && alpha.minCoeff() < 0.0) {
        throw std::invalid_argument("weighted_laplacian: negative edge weight");
    }
    return incidence * alpha.asDiagonal() * incidence.transpose();
}

CandidateSet prune_candidates(const CandidateSet& cs, int keep, std::uint64_t seed) {
    const int r = cs.size();
    if (keep < 1 || keep > r) {
        throw std::invalid_argument("prune_candidates: keep " + std::to_string(keep) + " outside [1, " +
                                    std::to_string(r) + "]");
    }
    if (keep == r) {
        return cs;
    }
    const auto n = cs.candidates.front().node_count();
    Rng rng(derive_seed(seed, "prune"));
    std::vector<int> order(static_cast<std::size_t>(r));
    for (int attempt = 0; attempt < kMaxPruneAttempts; ++attempt) {
        std::iota(order.begin(), order.end(), 0);
        // partial Fisher-Yates on the first `keep` slots
        for (int i = 0; i < keep; ++i) {
            const int j = i + static_cast<int>(uniform01(rng) * (r - i));
            std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
        }
        std::sort(order.begin(), order.begin() + keep);
        Matrix joint = Matrix::Zero(n, n);
        for (int i = 0; i < keep; ++i) {
            joint += cs.candidates[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])].adjacency;
        }
        if (connected(joint)) {
            CandidateSet out;
            out.budget = cs.budget;
            for (int i = 0; i < keep; ++i) {
                out.candidates.push_back(cs.candidates[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])]);
            }
            return out;
        }
    }
    throw std::runtime_error("prune_candidates: no connected selection of " + std::to_string(keep) +
                             " candidates found; increase keep");
}

nlohmann::json candidates_to_json(const CandidateSet& cs) {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& c : cs.candidates) list.push_back(c.subset_indices);
    return list;
}

CandidateSet candidates_from_json(const nlohmann::json& j, const Graph& g, const Partition& p) {
    CandidateSet cs;
    for (const auto& item : j) {
        cs.candidates.push_back(make_candidate(g, p, item.get<std::vector<int>>()));
    }
    cs.budget = cs.candidates.empty() ? 0 : cs.candidates.front().cost();
    return cs;
}

}  // namespace bass
