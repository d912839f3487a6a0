#include "bass/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

#include "bass/rng.hpp"

namespace bass {

namespace {

Matrix gram(const Matrix& w) { return w.transpose() * w; }

Matrix expected_gram(std::span<const Matrix> grams, const Vector& probs) {
    Matrix sum = Matrix::Zero(grams.front().rows(), grams.front().cols());
    for (std::size_t r = 0; r < grams.size(); ++r) {
        sum += probs(static_cast<Eigen::Index>(r)) * grams[r];
    }
    return sum;
}

// b_eᵀ M b_e for b_e = e_u - e_v.
double edge_quadratic(const Matrix& m, const Edge& e) { return m(e.u, e.u) - m(e.u, e.v) - m(e.v, e.u) + m(e.v, e.v); }

void require_budget(std::span<const int> costs, int budget) {
    for (int c : costs) {
        if (c > budget) {
            throw std::invalid_argument("candidate costs " + std::to_string(c) + " slots, above the budget of " +
                                        std::to_string(budget) + "; mixed-cost pools are not supported");
        }
    }
}

Vector uniform(std::size_t r) { return Vector::Constant(static_cast<Eigen::Index>(r), 1.0 / static_cast<double>(r)); }

std::vector<std::vector<int>> components(int n, std::span<const Edge> edges) {
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
    for (const Edge& e : edges) {
        adj[static_cast<std::size_t>(e.u)].push_back(e.v);
        adj[static_cast<std::size_t>(e.v)].push_back(e.u);
    }
    std::vector<int> label(static_cast<std::size_t>(n), -1);
    std::vector<std::vector<int>> out;
    for (int s = 0; s < n; ++s) {
        if (label[static_cast<std::size_t>(s)] >= 0) continue;
        std::vector<int> comp{s};
        label[static_cast<std::size_t>(s)] = static_cast<int>(out.size());
        for (std::size_t head = 0; head < comp.size(); ++head) {
            for (int w : adj[static_cast<std::size_t>(comp[head])]) {
                if (label[static_cast<std::size_t>(w)] < 0) {
                    label[static_cast<std::size_t>(w)] = static_cast<int>(out.size());
                    comp.push_back(w);
                }
            }
        }
        std::sort(comp.begin(), comp.end());
        out.push_back(std::move(comp));
    }
    return out;
}

}  // namespace

Matrix mixing_from_edge_weights(int n, std::span<const Edge> edges, const Vector& weights) {
    Matrix w = Matrix::Identity(n, n);
    for (std::size_t k = 0; k < edges.size(); ++k) {
        const double a = weights(static_cast<Eigen::Index>(k));
        const Edge& e = edges[k];
        w(e.u, e.v) += a;
        w(e.v, e.u) += a;
        w(e.u, e.u) -= a;
        w(e.v, e.v) -= a;
    }
    return w;
}

double rho(std::span<const Matrix> matrices, const Vector& probs) {
    if (matrices.empty() || static_cast<Eigen::Index>(matrices.size()) != probs.size()) {
        throw std::invalid_argument("rho: matrix and probability counts differ");
    }
    const auto n = matrices.front().rows();
    Matrix sum = -averaging_matrix(static_cast<int>(n));
    for (std::size_t r = 0; r < matrices.size(); ++r) {
        sum += probs(static_cast<Eigen::Index>(r)) * gram(matrices[r]);
    }
    return symmetric_norm(0.5 * (sum + sum.transpose()));
}

void check_policy(const MixingPolicy& policy, double tol) {
    const auto& cands = policy.candidates.candidates;
    if (cands.size() != policy.matrices.size() || static_cast<Eigen::Index>(cands.size()) != policy.probs.size()) {
        throw std::logic_error("policy: candidate, matrix and probability counts differ");
    }
    for (std::size_t r = 0; r < cands.size(); ++r) {
        const Matrix& w = policy.matrices[r];
        const Candidate& c = cands[r];
        const auto n = w.rows();
        const std::string tag = "policy matrix " + std::to_string(r) + ": ";
        if ((w - w.transpose()).cwiseAbs().maxCoeff() > tol) throw std::logic_error(tag + "not symmetric");
        if ((w.rowwise().sum().array() - 1.0).abs().maxCoeff() > tol) throw std::logic_error(tag + "row sums differ from 1");
        std::vector<char> active(static_cast<std::size_t>(n), 0);
        for (int i : c.nodes) active[static_cast<std::size_t>(i)] = 1;
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                if (i != j && w(i, j) != 0.0 && c.adjacency(i, j) == 0.0) {
                    throw std::logic_error(tag + "weight outside the candidate's links at (" + std::to_string(i) + "," +
                                           std::to_string(j) + ")");
                }
            }
            if (!active[static_cast<std::size_t>(i)] && w(i, i) != 1.0) {
                throw std::logic_error(tag + "unscheduled node " + std::to_string(i) + " lacks unit self-weight");
            }
        }
    }
    const Vector& p = policy.probs;
    if (!feasible(Domain::simplex, p, tol)) throw std::logic_error("policy: probabilities off the simplex");
    double slots = 0.0;
    for (std::size_t r = 0; r < cands.size(); ++r) slots += cands[r].cost() * p(static_cast<Eigen::Index>(r));
    if (slots > policy.candidates.budget + tol) throw std::logic_error("policy: expected slots exceed the budget");
    if (!(policy.rho < 1.0)) throw std::logic_error("policy: rho is not below 1");
}

Vector optimize_probabilities(std::span<const Matrix> matrices, std::span<const int> costs, int budget,
                              const SolverOptions& options, const std::optional<Vector>& start) {
    if (matrices.empty()) throw std::invalid_argument("optimize_probabilities: no candidates");
    if (costs.size() != matrices.size()) throw std::invalid_argument("optimize_probabilities: cost count mismatch");
    require_budget(costs, budget);
    const std::size_t r_count = matrices.size();
    if (r_count == 1) return Vector::Ones(1);

    std::vector<Matrix> grams;
    grams.reserve(r_count);
    for (const auto& w : matrices) grams.push_back(gram(w));
    const Matrix j = averaging_matrix(static_cast<int>(matrices.front().rows()));

    SpectralProblem problem;
    problem.dimension = static_cast<int>(r_count);
    problem.domain = Domain::simplex;
    problem.matrix = [&](const Vector& p) { return Matrix(expected_gram(grams, p) - j); };
    problem.gradient = [&](const Vector&, const Matrix& u) {
        Vector g(static_cast<Eigen::Index>(r_count));
        for (std::size_t r = 0; r < r_count; ++r) g(static_cast<Eigen::Index>(r)) = grams[r].cwiseProduct(u).sum();
        return g;
    };
    const Vector x0 = start ? project_simplex(*start) : uniform(r_count);
    return solve_spectral(problem, x0, options).x;
}

double matrix_subproblem_objective(int r, std::span<const Matrix> matrices, const Vector& probs) {
    Matrix z = -averaging_matrix(static_cast<int>(matrices.front().rows()));
    for (std::size_t l = 0; l < matrices.size(); ++l) {
        if (static_cast<int>(l) != r) z += probs(static_cast<Eigen::Index>(l)) * gram(matrices[l]);
    }
    const Matrix& w = matrices[static_cast<std::size_t>(r)];
    return lambda_max(z + probs(r) * (w * w));
}

Matrix optimize_matrix(int r, std::span<const Matrix> matrices, const Vector& probs, const Candidate& candidate,
                       const SolverOptions& options) {
    if (r < 0 || r >= static_cast<int>(matrices.size())) throw std::invalid_argument("optimize_matrix: index out of range");
    const Matrix& current = matrices[static_cast<std::size_t>(r)];
    const double pr = probs(r);
    const auto& edges = candidate.edges;
    const int n = static_cast<int>(current.rows());
    if (pr <= 0.0 || edges.empty()) return current;

    Vector start(static_cast<Eigen::Index>(edges.size()));
    for (std::size_t k = 0; k < edges.size(); ++k) start(static_cast<Eigen::Index>(k)) = current(edges[k].u, edges[k].v);
    const Matrix rebuilt = mixing_from_edge_weights(n, edges, start);
    if ((rebuilt - current).cwiseAbs().maxCoeff() > 1e-9) {
        throw std::invalid_argument("optimize_matrix: W_r is not a feasible mixing matrix for its candidate");
    }

    Matrix z = -averaging_matrix(n);
    for (std::size_t l = 0; l < matrices.size(); ++l) {
        if (static_cast<int>(l) != r) z += probs(static_cast<Eigen::Index>(l)) * gram(matrices[l]);
    }

    SpectralProblem problem;
    problem.dimension = static_cast<int>(edges.size());
    problem.domain = Domain::free;
    problem.matrix = [&](const Vector& a) {
        const Matrix w = mixing_from_edge_weights(n, edges, a);
        return Matrix(z + pr * (w * w));
    };
    problem.gradient = [&](const Vector& a, const Matrix& u) {
        const Matrix wu = mixing_from_edge_weights(n, edges, a) * u;
        Vector g(static_cast<Eigen::Index>(edges.size()));
        for (std::size_t k = 0; k < edges.size(); ++k) g(static_cast<Eigen::Index>(k)) = -2.0 * pr * edge_quadratic(wu, edges[k]);
        return g;
    };
    const auto result = solve_spectral(problem, start, options);
    return mixing_from_edge_weights(n, edges, result.x);
}

AlternatingResult alternating_optimize(const MixingPolicy& init, int outer_iterations, const SolverOptions& options) {
    AlternatingResult out;
    out.policy = init;
    out.policy.rho = rho(init.matrices, init.probs);
    if (!(out.policy.rho < 1.0)) {
        throw std::invalid_argument("alternating_optimize: initial rho " + std::to_string(out.policy.rho) +
                                    " is not below 1");
    }
    out.trace.push_back(out.policy.rho);
    const auto costs = init.candidates.costs();
    const int r_count = init.candidates.size();
    for (int m = 0; m < outer_iterations; ++m) {
        for (int r = 0; r < r_count; ++r) {
            auto& policy = out.policy;
            policy.matrices[static_cast<std::size_t>(r)] =
                optimize_matrix(r, policy.matrices, policy.probs, policy.candidates.candidates[static_cast<std::size_t>(r)],
                                options);
            out.trace.push_back(rho(policy.matrices, policy.probs));
            policy.probs = optimize_probabilities(policy.matrices, costs, policy.candidates.budget, options, policy.probs);
            policy.rho = rho(policy.matrices, policy.probs);
            out.trace.push_back(policy.rho);
        }
    }
    return out;
}

Vector init_probs_connectivity(std::span<const Matrix> laplacians, std::span<const int> costs, int budget,
                               const SolverOptions& options) {
    if (laplacians.empty()) throw std::invalid_argument("init_probs_connectivity: no candidates");
    require_budget(costs, budget);
    const std::size_t r_count = laplacians.size();
    if (r_count == 1) return Vector::Ones(1);
    const int n = static_cast<int>(laplacians.front().rows());
    const Matrix v = consensus_complement(n);
    std::vector<Matrix> reduced;
    for (const auto& l : laplacians) reduced.push_back(v.transpose() * l * v);

    SpectralProblem problem;
    problem.dimension = static_cast<int>(r_count);
    problem.domain = Domain::simplex;
    problem.matrix = [&](const Vector& p) {
        Matrix sum = Matrix::Zero(n - 1, n - 1);
        for (std::size_t r = 0; r < r_count; ++r) sum -= p(static_cast<Eigen::Index>(r)) * reduced[r];
        return sum;
    };
    problem.gradient = [&](const Vector&, const Matrix& u) {
        Vector g(static_cast<Eigen::Index>(r_count));
        for (std::size_t r = 0; r < r_count; ++r) g(static_cast<Eigen::Index>(r)) = -reduced[r].cwiseProduct(u).sum();
        return g;
    };
    return solve_spectral(problem, uniform(r_count), options).x;
}

EpsilonSolution init_epsilon(std::span<const Matrix> laplacians, const Vector& probs) {
    const auto n = laplacians.front().rows();
    Matrix first = Matrix::Zero(n, n);
    Matrix second = Matrix::Zero(n, n);
    for (std::size_t r = 0; r < laplacians.size(); ++r) {
        const double p = probs(static_cast<Eigen::Index>(r));
        first += p * laplacians[r];
        second += p * (laplacians[r] * laplacians[r]);
    }
    return minimize_link_weight(first, second);
}

std::vector<Matrix> init_weighted_matrices(const CandidateSet& cs, const SolverOptions& options) {
    std::vector<Matrix> out;
    out.reserve(cs.candidates.size());
    for (const auto& c : cs.candidates) {
        const int n = c.node_count();
        Vector weights = Vector::Zero(static_cast<Eigen::Index>(c.edges.size()));
        for (const auto& comp : components(n, c.edges)) {
            if (comp.size() < 2) continue;
            const int m = static_cast<int>(comp.size());
            std::vector<int> local(static_cast<std::size_t>(n), -1);
            for (int k = 0; k < m; ++k) local[static_cast<std::size_t>(comp[static_cast<std::size_t>(k)])] = k;
            std::vector<Edge> edges;
            std::vector<std::size_t> slot;
            std::vector<int> deg(static_cast<std::size_t>(m), 0);
            for (std::size_t k = 0; k < c.edges.size(); ++k) {
                const int u = local[static_cast<std::size_t>(c.edges[k].u)];
                if (u < 0) continue;
                const int v = local[static_cast<std::size_t>(c.edges[k].v)];
                edges.push_back({u, v});
                slot.push_back(k);
                ++deg[static_cast<std::size_t>(u)];
                ++deg[static_cast<std::size_t>(v)];
            }
            Vector start(static_cast<Eigen::Index>(edges.size()));
            for (std::size_t k = 0; k < edges.size(); ++k) {
                const int d = std::max(deg[static_cast<std::size_t>(edges[k].u)], deg[static_cast<std::size_t>(edges[k].v)]);
                start(static_cast<Eigen::Index>(k)) = 1.0 / (1.0 + d);
            }
            const Matrix jc = averaging_matrix(m);
            SpectralProblem problem;
            problem.dimension = static_cast<int>(edges.size());
            problem.domain = Domain::nonnegative;
            problem.matrix = [&](const Vector& a) {
                const Matrix dev = mixing_from_edge_weights(m, edges, a) - jc;
                Matrix block = Matrix::Zero(2 * m, 2 * m);
                block.topLeftCorner(m, m) = dev;
                block.bottomRightCorner(m, m) = -dev;
                return block;
            };
            problem.gradient = [&](const Vector&, const Matrix& u) {
                const Matrix upper = u.topLeftCorner(m, m);
                const Matrix lower = u.bottomRightCorner(m, m);
                Vector g(static_cast<Eigen::Index>(edges.size()));
                for (std::size_t k = 0; k < edges.size(); ++k) {
                    g(static_cast<Eigen::Index>(k)) = -edge_quadratic(upper, edges[k]) + edge_quadratic(lower, edges[k]);
                }
                return g;
            };
            const Vector best = solve_spectral(problem, start, options).x;
            for (std::size_t k = 0; k < slot.size(); ++k) weights(static_cast<Eigen::Index>(slot[k])) = best(static_cast<Eigen::Index>(k));
        }
        out.push_back(mixing_from_edge_weights(n, c.edges, weights));
    }
    return out;
}

MixingPolicy initialize_a(const CandidateSet& cs, const SolverOptions& options) {
    std::vector<Matrix> laplacians;
    for (const auto& c : cs.candidates) laplacians.push_back(candidate_laplacian(c));
    MixingPolicy policy;
    policy.candidates = cs;
    policy.probs = init_probs_connectivity(laplacians, cs.costs(), cs.budget, options);
    const double eps = init_epsilon(laplacians, policy.probs).epsilon;
    for (std::size_t r = 0; r < laplacians.size(); ++r) {
        policy.matrices.push_back(mixing_from_edge_weights(cs.candidates[r].node_count(), cs.candidates[r].edges,
                                                           Vector::Constant(static_cast<Eigen::Index>(cs.candidates[r].edges.size()), eps)));
    }
    policy.rho = rho(policy.matrices, policy.probs);
    return policy;
}

MixingPolicy initialize_b(const CandidateSet& cs, const SolverOptions& options) {
    MixingPolicy policy;
    policy.candidates = cs;
    policy.matrices = init_weighted_matrices(cs, options);
    policy.probs = optimize_probabilities(policy.matrices, cs.costs(), cs.budget, options);
    policy.rho = rho(policy.matrices, policy.probs);
    return policy;
}

InitChoice parse_init_choice(const std::string& name) {
    if (name == "a" || name == "A") return InitChoice::a;
    if (name == "b" || name == "B") return InitChoice::b;
    if (name == "best") return InitChoice::best;
    throw std::invalid_argument("unknown initialization '" + name + "' (expected a, b or best)");
}

PolicyOptimization optimize_policy(const CandidateSet& cs, int outer_iterations, InitChoice init,
                                   const SolverOptions& options) {
    std::vector<std::pair<std::string, MixingPolicy>> starts;
    if (init != InitChoice::b) starts.emplace_back("a", initialize_a(cs, options));
    if (init != InitChoice::a) starts.emplace_back("b", initialize_b(cs, options));

    std::optional<PolicyOptimization> best;
    for (auto& [name, start] : starts) {
        if (!(start.rho < 1.0)) continue;
        auto run = alternating_optimize(start, outer_iterations, options);
        if (!best || run.policy.rho < best->policy.rho) {
            best = PolicyOptimization{std::move(run.policy), std::move(run.trace), start.rho, name};
        }
    }
    if (!best) {
        throw std::runtime_error("optimize_policy: no initialization reached rho < 1; the candidate union is not connected");
    }
    return *best;
}

ConvexityReport convexity_probe(const MixingPolicy& policy, ConvexityAxis axis, int trials, std::uint64_t seed,
                                double tol) {
    Rng rng(derive_seed(seed, "convexity"));
    const auto& cands = policy.candidates.candidates;
    const std::size_t r_count = cands.size();
    auto random_simplex = [&] {
        Vector p(static_cast<Eigen::Index>(r_count));
        for (auto& v : p) v = -std::log(1.0 - uniform01(rng));
        return Vector(p / p.sum());
    };
    auto random_weights = [&] {
        std::vector<Vector> w;
        for (const auto& c : cands) {
            Vector a(static_cast<Eigen::Index>(c.edges.size()));
            for (auto& v : a) v = 2.0 * uniform01(rng) - 1.0;
            w.push_back(a);
        }
        return w;
    };
    auto matrices_of = [&](const std::vector<Vector>& w) {
        std::vector<Matrix> out;
        for (std::size_t r = 0; r < r_count; ++r) out.push_back(mixing_from_edge_weights(cands[r].node_count(), cands[r].edges, w[r]));
        return out;
    };

    ConvexityReport report;
    report.worst_gap = -std::numeric_limits<double>::infinity();
    for (int t = 0; t < trials; ++t) {
        const double theta = uniform01(rng);
        double fx = 0.0, fy = 0.0, fmix = 0.0;
        if (axis == ConvexityAxis::probabilities) {
            const Vector x = random_simplex();
            const Vector y = random_simplex();
            fx = rho(policy.matrices, x);
            fy = rho(policy.matrices, y);
            fmix = rho(policy.matrices, theta * x + (1.0 - theta) * y);
        } else {
            const auto x = random_weights();
            const auto y = random_weights();
            std::vector<Vector> mix;
            for (std::size_t r = 0; r < r_count; ++r) mix.push_back(theta * x[r] + (1.0 - theta) * y[r]);
            fx = rho(matrices_of(x), policy.probs);
            fy = rho(matrices_of(y), policy.probs);
            fmix = rho(matrices_of(mix), policy.probs);
        }
        const double gap = fmix - (theta * fx + (1.0 - theta) * fy);
        report.worst_gap = std::max(report.worst_gap, gap);
        if (gap > tol) ++report.violations;
        ++report.trials;
    }
    return report;
}

nlohmann::json policy_to_json(const MixingPolicy& policy) {
    nlohmann::json j;
    j["budget"] = policy.candidates.budget;
    j["candidates"] = candidates_to_json(policy.candidates);
    nlohmann::json mats = nlohmann::json::array();
    for (const auto& w : policy.matrices) {
        nlohmann::json rows = nlohmann::json::array();
        for (Eigen::Index i = 0; i < w.rows(); ++i) {
            std::vector<double> row(static_cast<std::size_t>(w.cols()));
            for (Eigen::Index k = 0; k < w.cols(); ++k) row[static_cast<std::size_t>(k)] = w(i, k);
            rows.push_back(row);
        }
        mats.push_back(rows);
    }
    j["matrices"] = mats;
    j["probs"] = std::vector<double>(policy.probs.data(), policy.probs.data() + policy.probs.size());
    j["rho"] = policy.rho;
    return j;
}

MixingPolicy policy_from_json(const nlohmann::json& j, const Graph& g, const Partition& p) {
    MixingPolicy policy;
    policy.candidates = candidates_from_json(j.at("candidates"), g, p);
    policy.candidates.budget = j.at("budget").get<int>();
    for (const auto& rows : j.at("matrices")) {
        const auto n = static_cast<Eigen::Index>(rows.size());
        Matrix w(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto row = rows.at(static_cast<std::size_t>(i)).get<std::vector<double>>();
            if (static_cast<Eigen::Index>(row.size()) != n) throw std::runtime_error("policy JSON: matrix is not square");
            for (Eigen::Index k = 0; k < n; ++k) w(i, k) = row[static_cast<std::size_t>(k)];
        }
        policy.matrices.push_back(std::move(w));
    }
    const auto probs = j.at("probs").get<std::vector<double>>();
    policy.probs = Eigen::Map<const Vector>(probs.data(), static_cast<Eigen::Index>(probs.size()));
    policy.rho = j.at("rho").get<double>();
    return policy;
}

}  // namespace bass
