#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "bass/sampler.hpp"
#include "bass/spectral.hpp"

namespace bass {

/// Candidate subgraphs with their mixing matrices and sampling probabilities.
struct MixingPolicy {
    CandidateSet candidates;
    std::vector<Matrix> matrices;
    Vector probs;
    double rho = 0.0;
};

/// || sum_r p_r W_rᵀ W_r - J ||_2
double rho(std::span<const Matrix> matrices, const Vector& probs);

/// Throws std::logic_error naming the first violated invariant: symmetry,
/// unit row sums, sparsity inside the candidate's edges, identity rows for
/// unscheduled nodes, probabilities on the simplex, budget, and rho < 1.
void check_policy(const MixingPolicy& policy, double tol = 1e-10);

/// Probabilities minimizing rho for fixed matrices, started from `start`
/// (uniform when absent).
/// The slot constraint sum |D_r| p_r <= budget is implied by the simplex when
/// no candidate costs more than the budget; pools with costlier candidates
/// are rejected with std::invalid_argument.
Vector optimize_probabilities(std::span<const Matrix> matrices, std::span<const int> costs, int budget,
                              const SolverOptions& options = {}, const std::optional<Vector>& start = std::nullopt);

/// Re-optimizes W_r with the other matrices and all probabilities fixed.
/// The variable is one weight per effective edge of `candidate`; diagonals
/// follow from unit row sums.
Matrix optimize_matrix(int r, std::span<const Matrix> matrices, const Vector& probs, const Candidate& candidate,
                       const SolverOptions& options = {});

/// lambda_max(Z_r + p_r W_r²) with Z_r = sum_{l != r} p_l W_l² - J.
double matrix_subproblem_objective(int r, std::span<const Matrix> matrices, const Vector& probs);

struct AlternatingResult {
    MixingPolicy policy;
    /// rho after initialization and after every matrix / probability update.
    std::vector<double> trace;
};

/// Alternates per-candidate matrix updates and probability updates for
/// `outer_iterations` sweeps. Throws std::invalid_argument if rho(init) >= 1.
AlternatingResult alternating_optimize(const MixingPolicy& init, int outer_iterations,
                                       const SolverOptions& options = {});

/// Probabilities maximizing lambda_2(sum_r p_r L_r).
Vector init_probs_connectivity(std::span<const Matrix> laplacians, std::span<const int> costs, int budget,
                               const SolverOptions& options = {});

/// Link weight for W_r = I - eps L_r minimizing
/// lambda_max(I - 2 eps sum p_r L_r + eps^2 sum p_r L_r^2 - J).
EpsilonSolution init_epsilon(std::span<const Matrix> laplacians, const Vector& probs);

/// One nonnegative weight vector per candidate, W_r = I - B_r diag(alpha_r) B_rᵀ,
/// chosen per connected component of the candidate to minimize
/// || W - J_component ||_2 (block averaging on each component).
std::vector<Matrix> init_weighted_matrices(const CandidateSet& cs, const SolverOptions& options = {});

/// Connectivity-maximizing probabilities + common link weight.
MixingPolicy initialize_a(const CandidateSet& cs, const SolverOptions& options = {});

/// Per-candidate weighted Laplacians + rho-minimizing probabilities.
MixingPolicy initialize_b(const CandidateSet& cs, const SolverOptions& options = {});

enum class InitChoice { a, b, best };

InitChoice parse_init_choice(const std::string& name);

struct PolicyOptimization {
    MixingPolicy policy;
    std::vector<double> trace;
    double init_rho = 0.0;
    std::string init_used;
};

/// Runs the alternating scheme from the requested initialization(s) and keeps
/// the lowest-rho result. Initializations with rho >= 1 are skipped; if none
/// is usable std::runtime_error is thrown.
PolicyOptimization optimize_policy(const CandidateSet& cs, int outer_iterations, InitChoice init = InitChoice::best,
                                   const SolverOptions& options = {});

/// Jensen check of the rho objective along one block.
enum class ConvexityAxis { probabilities, matrices };

struct ConvexityReport {
    int trials = 0;
    int violations = 0;
    double worst_gap = 0.0;  ///< max over trials of f(mix) - (theta f(x) + (1-theta) f(y))
};

/// For `trials` random feasible pairs along `axis` (the other block fixed at
/// `policy`), checks f(theta x + (1-theta) y) <= theta f(x) + (1-theta) f(y) + tol.
ConvexityReport convexity_probe(const MixingPolicy& policy, ConvexityAxis axis, int trials, std::uint64_t seed,
                                double tol = 1e-9);

/// Lookup table: candidates as subset-index lists, dense row-major matrices,
/// probabilities and rho.
nlohmann::json policy_to_json(const MixingPolicy& policy);
MixingPolicy policy_from_json(const nlohmann::json& j, const Graph& g, const Partition& p);

/// W = I - sum_e alpha_e b_e b_eᵀ over `edges`.
Matrix mixing_from_edge_weights(int n, std::span<const Edge> edges, const Vector& weights);

}  // namespace bass
