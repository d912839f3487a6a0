#pragma once

#include <functional>
#include <vector>

#include "bass/graph.hpp"

namespace bass {

/// Feasible set of a spectral problem's variable block.
enum class Domain {
    simplex,      ///< x >= 0, sum x = 1
    nonnegative,  ///< x >= 0
    free,
};

/// minimize  lambda_max(F(x))  over x in `domain`, for a symmetric-valued F
/// whose lambda_max is convex in x.
///
/// `gradient(x, U)` must return the vector of inner products <dF/dx_k, U>
/// for a symmetric weight matrix U; the solver passes U = sum_i w_i u_i u_iᵀ
/// built from the eigenpairs of F(x).
struct SpectralProblem {
    int dimension = 0;
    Domain domain = Domain::free;
    std::function<Matrix(const Vector&)> matrix;
    std::function<Vector(const Vector&, const Matrix&)> gradient;
};

struct SolverOptions {
    double tol = 1e-6;
    int max_iters = 5000;  ///< objective evaluations
};

struct SpectralResult {
    Vector x;
    double objective = 0.0;
    double start_objective = 0.0;
    int evaluations = 0;
    bool converged = false;
    std::vector<double> trace;  ///< best-so-far objective after each improvement
};

/// Minimizes a smoothed surrogate  mu log sum exp(lambda_i / mu)  with
/// spectral projected gradient, shrinking mu until the smoothing bias is
/// below tol/4. The returned point is the best one evaluated under the true
/// objective, so it is never worse than `start`. Throws std::invalid_argument
/// if `start` is infeasible.
SpectralResult solve_spectral(const SpectralProblem& problem, const Vector& start, const SolverOptions& options = {});

double lambda_max(const Matrix& m);

/// Largest absolute eigenvalue of a symmetric matrix.
double symmetric_norm(const Matrix& m);

Vector project(Domain domain, const Vector& x);

/// Euclidean projection onto the probability simplex.
Vector project_simplex(const Vector& x);

bool feasible(Domain domain, const Vector& x, double slack = 1e-9);

/// min over eps >= 0 of lambda_max(I - J - 2 eps A + eps^2 B) for PSD A and
/// B with A1 = B1 = 0. Golden-section over (0, 2/lambda_max(A)] followed by
/// a stationary-point polish on the active eigenvector.
struct EpsilonSolution {
    double epsilon = 0.0;
    double objective = 0.0;
};
EpsilonSolution minimize_link_weight(const Matrix& first, const Matrix& second);

/// Orthonormal basis of the complement of the all-ones vector (n x n-1).
Matrix consensus_complement(int n);

Matrix averaging_matrix(int n);

}  // namespace bass
