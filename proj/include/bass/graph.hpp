#pragma once

#include <compare>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace bass {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Undirected edge stored with u < v.
struct Edge {
    int u = 0;
    int v = 0;

    auto operator<=>(const Edge&) const = default;
};

/// Undirected simple graph on nodes 0..n-1.
///
/// Edges are normalized (u < v), deduplicated and kept sorted, so two graphs
/// built from the same edge multiset compare equal.
class Graph {
  public:
    Graph() = default;

    /// Throws std::invalid_argument on an out-of-range endpoint or a self-loop.
    Graph(int n, std::span<const Edge> edges);

    int size() const { return n_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<int>& neighbors(int i) const { return adj_[static_cast<std::size_t>(i)]; }
    int degree(int i) const { return static_cast<int>(neighbors(i).size()); }
    int max_degree() const;
    bool adjacent(int i, int j) const;

    Matrix adjacency() const;
    bool connected() const;

    bool operator==(const Graph& other) const { return n_ == other.n_ && edges_ == other.edges_; }

  private:
    int n_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::vector<int>> adj_;
};

Graph build_graph(int n, std::span<const std::pair<int, int>> pairs);

/// Plain-text format: first non-comment line `n`, then one `i j` per edge.
/// `#` starts a comment. Throws std::runtime_error with a line number.
Graph read_graph(std::istream& in);
void write_graph(std::ostream& out, const Graph& g);

/// Base edges plus an edge between every pair of nodes with a common neighbor.
Graph auxiliary_graph(const Graph& g);

/// Ordered list of disjoint collision-free node subsets covering all nodes.
struct Partition {
    std::vector<std::vector<int>> subsets;

    int count() const { return static_cast<int>(subsets.size()); }
    /// subset index of every node; requires a covering partition of n nodes.
    std::vector<int> subset_of(int n) const;
};

enum class ColoringOrder { degree_descending, natural };

/// Node visiting order for greedy coloring. `degree_descending` sorts by
/// auxiliary-graph degree, ties by node index.
std::vector<int> coloring_order(const Graph& aux, ColoringOrder order = ColoringOrder::degree_descending);

/// Greedy vertex coloring of `aux` visiting nodes in `order`; each color class
/// becomes one subset, subsets ordered by color index.
Partition greedy_coloring(const Graph& aux, std::span<const int> order);

/// auxiliary_graph + greedy_coloring with the given order.
Partition collision_free_partition(const Graph& g, ColoringOrder order = ColoringOrder::degree_descending);

/// True when no two nodes of `subset` are adjacent or share a neighbor in `g`.
bool is_collision_free(const Graph& g, std::span<const int> subset);

/// Disjoint, covering and every subset collision-free.
bool is_valid_partition(const Graph& g, const Partition& p);

Matrix laplacian(const Graph& g);

/// Second-smallest eigenvalue of a symmetric matrix. Throws on asymmetric input.
double algebraic_connectivity(const Matrix& m);

/// 1ᵀA1 / (n(n-1)).
double density(const Graph& g);

/// Connectivity of the graph given by the nonzero off-diagonal pattern of `adjacency`.
bool connected(const Matrix& adjacency);

}  // namespace bass
