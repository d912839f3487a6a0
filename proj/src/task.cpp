#include "bass/task.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace bass {

TaskKind parse_task_kind(std::string_view name) {
    if (name == "least_squares") return TaskKind::least_squares;
    if (name == "logistic") return TaskKind::logistic;
    throw std::invalid_argument("unknown task kind '" + std::string(name) + "'");
}

std::string to_string(TaskKind kind) { return kind == TaskKind::least_squares ? "least_squares" : "logistic"; }

namespace {

inline double sigmoid(double z) {
    return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

// log(1 + exp(z)) without overflow
inline double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

}  // namespace

double Task::local_loss(int node, const Vector& x) const {
    const auto& d = nodes[static_cast<std::size_t>(node)];
    const Vector z = d.features * x;
    const double m = static_cast<double>(d.targets.size());
    double data = 0.0;
    if (kind == TaskKind::least_squares) {
        data = 0.5 * (z - d.targets).squaredNorm() / m;
    } else {
        for (Eigen::Index s = 0; s < z.size(); ++s) data += softplus(z(s)) - d.targets(s) * z(s);
        data /= m;
    }
    return data + 0.5 * reg * x.squaredNorm();
}

Vector Task::local_batch_gradient(int node, const Vector& x, const std::vector<int>& rows) const {
    const auto& d = nodes[static_cast<std::size_t>(node)];
    Vector g = Vector::Zero(dim);
    for (int s : rows) {
        const double z = d.features.row(s).dot(x);
        const double residual = kind == TaskKind::least_squares ? z - d.targets(s) : sigmoid(z) - d.targets(s);
        g.noalias() += residual * d.features.row(s).transpose();
    }
    g /= static_cast<double>(rows.size());
    g += reg * x;
    return g;
}

Vector Task::local_full_gradient(int node, const Vector& x) const {
    const auto& d = nodes[static_cast<std::size_t>(node)];
    const Vector z = d.features * x;
    Vector residual(z.size());
    for (Eigen::Index s = 0; s < z.size(); ++s) {
        residual(s) = kind == TaskKind::least_squares ? z(s) - d.targets(s) : sigmoid(z(s)) - d.targets(s);
    }
    return d.features.transpose() * residual / static_cast<double>(z.size()) + reg * x;
}

double Task::loss(const Vector& x) const {
    double sum = 0.0;
    for (int i = 0; i < node_count(); ++i) sum += local_loss(i, x);
    return sum / node_count();
}

Vector Task::gradient(const Vector& x) const {
    Vector sum = Vector::Zero(dim);
    for (int i = 0; i < node_count(); ++i) sum += local_full_gradient(i, x);
    return sum / node_count();
}

Vector Task::local_optimum(int node) const {
    if (kind != TaskKind::least_squares) {
        throw std::logic_error("local_optimum: closed form only for least squares");
    }
    const auto& d = nodes[static_cast<std::size_t>(node)];
    const double m = static_cast<double>(d.targets.size());
    const Matrix h = d.features.transpose() * d.features / m + reg * Matrix::Identity(dim, dim);
    return h.ldlt().solve(d.features.transpose() * d.targets / m);
}

Task make_task(TaskKind kind, int nodes, int dim, int samples_per_node, double heterogeneity, std::uint64_t seed,
               double reg) {
    if (nodes <= 0 || dim <= 0 || samples_per_node <= 0) {
        throw std::invalid_argument("make_task: node, dimension and sample counts must be positive");
    }
    if (!(reg > 0.0)) throw std::invalid_argument("make_task: regularization must be positive");
    Task task;
    task.kind = kind;
    task.dim = dim;
    task.reg = reg;

    std::normal_distribution<double> normal(0.0, 1.0);
    const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
    Rng shared(derive_seed(seed, "task/model"));
    Vector theta(dim);
    for (auto& v : theta) v = normal(shared);

    for (int i = 0; i < nodes; ++i) {
        // a homogeneous task replicates one dataset, so every local optimum is the global one
        const auto stream = heterogeneity > 0.0 ? static_cast<std::uint64_t>(i) : 0;
        Rng rng(derive_seed(seed, "task/node", stream));
        normal.reset();
        Vector local = theta;
        for (auto& v : local) v += heterogeneity * normal(rng);
        NodeData d;
        d.features.resize(samples_per_node, dim);
        d.targets.resize(samples_per_node);
        for (int s = 0; s < samples_per_node; ++s) {
            for (int k = 0; k < dim; ++k) d.features(s, k) = scale * normal(rng);
            const double z = d.features.row(s).dot(local);
            if (kind == TaskKind::least_squares) {
                d.targets(s) = z + 0.1 * normal(rng);
            } else {
                d.targets(s) = uniform01(rng) < 1.0 / (1.0 + std::exp(-4.0 * z)) ? 1.0 : 0.0;
            }
        }
        task.nodes.push_back(std::move(d));
    }

    if (kind == TaskKind::least_squares) {
        Matrix h = Matrix::Zero(dim, dim);
        Vector rhs = Vector::Zero(dim);
        for (const auto& d : task.nodes) {
            const double m = static_cast<double>(d.targets.size());
            h += d.features.transpose() * d.features / m;
            rhs += d.features.transpose() * d.targets / m;
        }
        h /= nodes;
        rhs /= nodes;
        h += reg * Matrix::Identity(dim, dim);
        task.optimum = h.ldlt().solve(rhs);
        task.optimal_value = task.loss(*task.optimum);
    }
    return task;
}

Vector local_gradient(const Task& task, int node, const Vector& x, int batch_size, Rng& rng) {
    const int m = static_cast<int>(task.nodes[static_cast<std::size_t>(node)].targets.size());
    if (batch_size <= 0 || batch_size >= m) {
        return task.local_full_gradient(node, x);
    }
    // partial Fisher-Yates: first batch_size entries are a uniform sample without replacement
    std::vector<int> rows(static_cast<std::size_t>(m));
    std::iota(rows.begin(), rows.end(), 0);
    for (int k = 0; k < batch_size; ++k) {
        const int j = k + static_cast<int>(uniform01(rng) * (m - k));
        std::swap(rows[static_cast<std::size_t>(k)], rows[static_cast<std::size_t>(j)]);
    }
    rows.resize(static_cast<std::size_t>(batch_size));
    return task.local_batch_gradient(node, x, rows);
}

double smoothness(const Task& task) {
    double best = 0.0;
    for (const auto& d : task.nodes) {
        const Matrix h = d.features.transpose() * d.features / static_cast<double>(d.targets.size());
        Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
        double top = es.eigenvalues().maxCoeff();
        if (task.kind == TaskKind::logistic) top *= 0.25;
        best = std::max(best, top);
    }
    return best + task.reg;
}

}  // namespace bass
