#include "bass/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace bass {

namespace {

struct Smoothed {
    double value = 0.0;       // smoothed objective
    double true_value = 0.0;  // lambda_max
    Vector gradient;
};

Smoothed evaluate(const SpectralProblem& problem, const Vector& x, double mu) {
    const Matrix f = problem.matrix(x);
    Eigen::SelfAdjointEigenSolver<Matrix> es(f);
    const Vector& lambda = es.eigenvalues();
    const Eigen::Index n = lambda.size();
    const double top = lambda(n - 1);

    Vector w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        w(i) = std::exp((lambda(i) - top) / mu);
    }
    const double total = w.sum();
    w /= total;

    Matrix u = es.eigenvectors() * w.asDiagonal() * es.eigenvectors().transpose();
    Smoothed s;
    s.true_value = top;
    s.value = top + mu * std::log(total);
    s.gradient = problem.gradient(x, u);
    return s;
}

}  // namespace

double lambda_max(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(es.eigenvalues().size() - 1);
}

double symmetric_norm(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

Vector project_simplex(const Vector& x) {
    const Eigen::Index n = x.size();
    std::vector<double> sorted(x.data(), x.data() + n);
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double cumulative = 0.0;
    double theta = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
        cumulative += sorted[static_cast<std::size_t>(k)];
        const double t = (cumulative - 1.0) / static_cast<double>(k + 1);
        if (sorted[static_cast<std::size_t>(k)] - t > 0.0) {
            theta = t;
        }
    }
    return (x.array() - theta).cwiseMax(0.0).matrix();
}

Vector project(Domain domain, const Vector& x) {
    switch (domain) {
        case Domain::simplex: return project_simplex(x);
        case Domain::nonnegative: return x.cwiseMax(0.0);
        case Domain::free: return x;
    }
    return x;
}

bool feasible(Domain domain, const Vector& x, double slack) {
    if (!x.allFinite()) return false;
    switch (domain) {
        case Domain::simplex:
            return x.size() > 0 && x.minCoeff() >= -slack && std::abs(x.sum() - 1.0) <= slack;
        case Domain::nonnegative:
            return x.size() == 0 || x.minCoeff() >= -slack;
        case Domain::free:
            return true;
    }
    return false;
}

SpectralResult solve_spectral(const SpectralProblem& problem, const Vector& start, const SolverOptions& options) {
    if (start.size() != problem.dimension || !feasible(problem.domain, start)) {
        throw std::invalid_argument("solve_spectral: infeasible start point");
    }

    SpectralResult result;
    result.x = start;
    const Matrix f0 = problem.matrix(start);
    Eigen::SelfAdjointEigenSolver<Matrix> es0(f0, Eigen::EigenvaluesOnly);
    const Vector& lambda0 = es0.eigenvalues();
    result.objective = lambda0(lambda0.size() - 1);
    result.start_objective = result.objective;
    result.trace.push_back(result.objective);
    result.evaluations = 1;
    if (problem.dimension == 0) {
        result.converged = true;
        return result;
    }

    const double log_n = std::log(std::max<double>(2.0, static_cast<double>(f0.rows())));
    const double mu_final = options.tol / (4.0 * log_n);
    const double spread = lambda0(lambda0.size() - 1) - lambda0(0);
    double mu = std::max(mu_final, 0.05 * std::max(spread, options.tol));

    auto note = [&](const Vector& x, double value) {
        if (value < result.objective - 1e-14 * std::max(1.0, std::abs(result.objective))) {
            result.objective = value;
            result.x = x;
            result.trace.push_back(value);
        }
    };

    Vector x = start;
    constexpr int kWindow = 10;
    constexpr double kArmijo = 1e-4;
    while (true) {
        const bool last_stage = mu <= mu_final;
        Smoothed cur = evaluate(problem, x, mu);
        ++result.evaluations;
        note(x, cur.true_value);

        double step = 1.0 / std::max(1e-12, cur.gradient.lpNorm<Eigen::Infinity>());
        std::deque<double> recent{cur.value};
        std::deque<double> progress{cur.value};
        bool stalled = false;
        while (result.evaluations < options.max_iters) {
            const Vector target = project(problem.domain, x - step * cur.gradient);
            const Vector d = target - x;
            if (d.lpNorm<Eigen::Infinity>() <= 1e-13) {
                stalled = true;
                break;
            }
            const double slope = cur.gradient.dot(d);
            const double reference = *std::max_element(recent.begin(), recent.end());
            double t = 1.0;
            Vector next;
            Smoothed trial;
            bool accepted = false;
            for (int halving = 0; halving < 40 && result.evaluations < options.max_iters; ++halving) {
                next = x + t * d;
                trial = evaluate(problem, next, mu);
                ++result.evaluations;
                note(next, trial.true_value);
                if (trial.value <= reference + kArmijo * t * slope) {
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            if (!accepted) {
                stalled = true;
                break;
            }
            const Vector s = next - x;
            const Vector y = trial.gradient - cur.gradient;
            const double sy = s.dot(y);
            step = sy > 0.0 ? std::clamp(s.squaredNorm() / sy, 1e-12, 1e12) : 1e12;
            x = next;
            cur = std::move(trial);

            recent.push_back(cur.value);
            if (recent.size() > kWindow) recent.pop_front();
            progress.push_back(cur.value);
            if (progress.size() > kWindow) {
                progress.pop_front();
                if (progress.front() - progress.back() < 1e-3 * mu) {
                    stalled = true;
                    break;
                }
            }
        }
        if (last_stage) {
            result.converged = stalled;
            break;
        }
        if (result.evaluations >= options.max_iters) {
            break;
        }
        mu = std::max(mu_final, 0.2 * mu);
        // restart the stage from the best point under the true objective
        x = result.x;
    }
    return result;
}

EpsilonSolution minimize_link_weight(const Matrix& first, const Matrix& second) {
    const Eigen::Index n = first.rows();
    const Matrix base = Matrix::Identity(n, n) - averaging_matrix(static_cast<int>(n));
    const double top = lambda_max(first);
    if (!(top > 1e-14)) {
        throw std::invalid_argument("minimize_link_weight: expected graph has no links");
    }
    auto objective = [&](double eps) { return lambda_max(base - 2.0 * eps * first + eps * eps * second); };

    constexpr double kGolden = 0.6180339887498949;
    double lo = 0.0;
    double hi = 2.0 / top;
    double a = hi - kGolden * (hi - lo);
    double b = lo + kGolden * (hi - lo);
    double fa = objective(a);
    double fb = objective(b);
    for (int it = 0; it < 200 && hi - lo > 1e-15 * (2.0 / top); ++it) {
        if (fa <= fb) {
            hi = b;
            b = a;
            fb = fa;
            a = hi - kGolden * (hi - lo);
            fa = objective(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + kGolden * (hi - lo);
            fb = objective(b);
        }
    }
    EpsilonSolution best{fa <= fb ? a : b, std::min(fa, fb)};

    // Where one eigenvalue is active the objective is the quadratic
    // u'(I-J)u - 2 eps u'Au + eps^2 u'Bu, minimized in closed form.
    const Matrix at = base - 2.0 * best.epsilon * first + best.epsilon * best.epsilon * second;
    Eigen::SelfAdjointEigenSolver<Matrix> es(at);
    const Vector u = es.eigenvectors().col(n - 1);
    const double curvature = u.dot(second * u);
    if (curvature > 0.0) {
        const double polished = std::clamp(u.dot(first * u) / curvature, 0.0, 2.0 / top);
        const double value = objective(polished);
        if (value <= best.objective) {
            best = {polished, value};
        }
    }
    return best;
}

Matrix consensus_complement(int n) {
    Matrix v = Matrix::Zero(n, std::max(n - 1, 0));
    for (int k = 1; k < n; ++k) {
        const double scale = 1.0 / std::sqrt(static_cast<double>(k) * (k + 1));
        for (int i = 0; i < k; ++i) v(i, k - 1) = scale;
        v(k, k - 1) = -k * scale;
    }
    return v;
}

Matrix averaging_matrix(int n) { return Matrix::Constant(n, n, 1.0 / n); }

}  // namespace bass
