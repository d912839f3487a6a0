#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bass/graph.hpp"
#include "bass/rng.hpp"

namespace bass {

enum class TaskKind { least_squares, logistic };

TaskKind parse_task_kind(std::string_view name);
std::string to_string(TaskKind kind);

struct NodeData {
    Matrix features;  ///< samples x dim
    Vector targets;   ///< real targets (least squares) or labels in {0, 1} (logistic)
};

/// Synthetic decentralized learning problem with L2 regularization.
///
/// F_i(x) = mean loss over node i's samples + reg/2 |x|^2 and F = mean_i F_i.
struct Task {
    TaskKind kind = TaskKind::least_squares;
    int dim = 0;
    double reg = 0.0;
    std::vector<NodeData> nodes;
    std::optional<Vector> optimum;  ///< exact minimizer (least squares only)
    std::optional<double> optimal_value;

    int node_count() const { return static_cast<int>(nodes.size()); }

    double local_loss(int node, const Vector& x) const;
    Vector local_full_gradient(int node, const Vector& x) const;
    /// Gradient over the given sample rows of one node.
    Vector local_batch_gradient(int node, const Vector& x, const std::vector<int>& rows) const;

    double loss(const Vector& x) const;
    Vector gradient(const Vector& x) const;
    /// Exact minimizer of F_i (least squares only).
    Vector local_optimum(int node) const;
};

/// Per-node data drawn from node-specific linear models
/// theta_i = theta + heterogeneity * z_i, z_i ~ N(0, I/dim), features ~ N(0, I/dim).
/// With zero heterogeneity every node gets the same dataset. Least squares
/// stores the global minimizer of the normal equations.
Task make_task(TaskKind kind, int nodes, int dim, int samples_per_node, double heterogeneity, std::uint64_t seed,
               double reg = 1e-2);

/// Minibatch gradient sampled uniformly without replacement from the node's
/// data; the full local gradient when batch_size is 0 or covers the dataset.
Vector local_gradient(const Task& task, int node, const Vector& x, int batch_size, Rng& rng);

/// Smoothness constant of F: max_i lambda_max of the local Hessian bound.
double smoothness(const Task& task);

}  // namespace bass
