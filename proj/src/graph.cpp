#include "bass/graph.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace bass {

Graph::Graph(int n, std::span<const Edge> edges) : n_(n), adj_(static_cast<std::size_t>(std::max(n, 0))) {
    if (n < 0) {
        throw std::invalid_argument("graph: negative node count");
    }
    edges_.reserve(edges.size());
    for (const Edge& e : edges) {
        if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n) {
            throw std::invalid_argument("graph: edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                                        ") has an endpoint outside [0," + std::to_string(n) + ")");
        }
        if (e.u == e.v) {
            throw std::invalid_argument("graph: self-loop at node " + std::to_string(e.u));
        }
        edges_.push_back({std::min(e.u, e.v), std::max(e.u, e.v)});
    }
    std::sort(edges_.begin(), edges_.end());
    edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
    for (const Edge& e : edges_) {
        adj_[static_cast<std::size_t>(e.u)].push_back(e.v);
        adj_[static_cast<std::size_t>(e.v)].push_back(e.u);
    }
    for (auto& list : adj_) {
        std::sort(list.begin(), list.end());
    }
}

int Graph::max_degree() const {
    int best = 0;
    for (int i = 0; i < n_; ++i) {
        best = std::max(best, degree(i));
    }
    return best;
}

bool Graph::adjacent(int i, int j) const {
    const auto& list = neighbors(i);
    return std::binary_search(list.begin(), list.end(), j);
}

Matrix Graph::adjacency() const {
    Matrix a = Matrix::Zero(n_, n_);
    for (const Edge& e : edges_) {
        a(e.u, e.v) = 1.0;
        a(e.v, e.u) = 1.0;
    }
    return a;
}

bool Graph::connected() const {
    if (n_ <= 1) {
        return true;
    }
    std::vector<char> seen(static_cast<std::size_t>(n_), 0);
    std::queue<int> frontier;
    frontier.push(0);
    seen[0] = 1;
    int reached = 1;
    while (!frontier.empty()) {
        const int v = frontier.front();
        frontier.pop();
        for (int w : neighbors(v)) {
            if (!seen[static_cast<std::size_t>(w)]) {
                seen[static_cast<std::size_t>(w)] = 1;
                ++reached;
                frontier.push(w);
            }
        }
    }
    return reached == n_;
}

Graph build_graph(int n, std::span<const std::pair<int, int>> pairs) {
    std::vector<Edge> edges;
    edges.reserve(pairs.size());
    for (auto [i, j] : pairs) {
        edges.push_back({i, j});
    }
    return Graph(n, edges);
}

Graph read_graph(std::istream& in) {
    std::string line;
    int line_no = 0;
    int n = -1;
    std::vector<Edge> edges;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        std::istringstream ss(line);
        std::vector<long long> fields;
        long long value = 0;
        while (ss >> value) {
            fields.push_back(value);
        }
        if (!ss.eof()) {
            throw std::runtime_error("graph file line " + std::to_string(line_no) + ": expected integers");
        }
        if (fields.empty()) {
            continue;
        }
        if (n < 0) {
            if (fields.size() != 1 || fields[0] <= 0) {
                throw std::runtime_error("graph file line " + std::to_string(line_no) +
                                         ": first line must be a positive node count");
            }
            n = static_cast<int>(fields[0]);
            continue;
        }
        if (fields.size() != 2) {
            throw std::runtime_error("graph file line " + std::to_string(line_no) + ": expected `i j`");
        }
        edges.push_back({static_cast<int>(fields[0]), static_cast<int>(fields[1])});
    }
    if (n < 0) {
        throw std::runtime_error("graph file: missing node count");
    }
    try {
        return Graph(n, edges);
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(std::string("graph file: ") + e.what());
    }
}

void write_graph(std::ostream& out, const Graph& g) {
    out << g.size() << '\n';
    for (const Edge& e : g.edges()) {
        out << e.u << ' ' << e.v << '\n';
    }
}

Graph auxiliary_graph(const Graph& g) {
    std::vector<Edge> edges(g.edges().begin(), g.edges().end());
    for (int m = 0; m < g.size(); ++m) {
        const auto& nb = g.neighbors(m);
        for (std::size_t a = 0; a < nb.size(); ++a) {
            for (std::size_t b = a + 1; b < nb.size(); ++b) {
                edges.push_back({nb[a], nb[b]});
            }
        }
    }
    return Graph(g.size(), edges);
}

std::vector<int> Partition::subset_of(int n) const {
    std::vector<int> owner(static_cast<std::size_t>(n), -1);
    for (std::size_t k = 0; k < subsets.size(); ++k) {
        for (int i : subsets[k]) {
            if (i < 0 || i >= n) {
                throw std::invalid_argument("partition: node " + std::to_string(i) + " out of range");
            }
            owner[static_cast<std::size_t>(i)] = static_cast<int>(k);
        }
    }
    if (std::find(owner.begin(), owner.end(), -1) != owner.end()) {
        throw std::invalid_argument("partition does not cover every node");
    }
    return owner;
}

std::vector<int> coloring_order(const Graph& aux, ColoringOrder order) {
    std::vector<int> nodes(static_cast<std::size_t>(aux.size()));
    std::iota(nodes.begin(), nodes.end(), 0);
    if (order == ColoringOrder::degree_descending) {
        std::stable_sort(nodes.begin(), nodes.end(),
                         [&](int a, int b) { return aux.degree(a) > aux.degree(b); });
    }
    return nodes;
}

Partition greedy_coloring(const Graph& aux, std::span<const int> order) {
    const int n = aux.size();
    std::vector<char> placed(static_cast<std::size_t>(n), 0);
    if (static_cast<int>(order.size()) != n) {
        throw std::invalid_argument("greedy_coloring: order is not a permutation");
    }
    for (int v : order) {
        if (v < 0 || v >= n || placed[static_cast<std::size_t>(v)]) {
            throw std::invalid_argument("greedy_coloring: order is not a permutation");
        }
        placed[static_cast<std::size_t>(v)] = 1;
    }

    std::vector<int> color(static_cast<std::size_t>(n), -1);
    std::vector<char> taken;
    int colors = 0;
    for (int v : order) {
        taken.assign(static_cast<std::size_t>(aux.degree(v) + 1), 0);
        for (int w : aux.neighbors(v)) {
            const int c = color[static_cast<std::size_t>(w)];
            if (c >= 0 && c < static_cast<int>(taken.size())) {
                taken[static_cast<std::size_t>(c)] = 1;
            }
        }
        const int c = static_cast<int>(std::find(taken.begin(), taken.end(), 0) - taken.begin());
        color[static_cast<std::size_t>(v)] = c;
        colors = std::max(colors, c + 1);
    }

    Partition p;
    p.subsets.resize(static_cast<std::size_t>(colors));
    for (int v = 0; v < n; ++v) {
        p.subsets[static_cast<std::size_t>(color[static_cast<std::size_t>(v)])].push_back(v);
    }
    return p;
}

Partition collision_free_partition(const Graph& g, ColoringOrder order) {
    const Graph aux = auxiliary_graph(g);
    const auto visit = coloring_order(aux, order);
    return greedy_coloring(aux, visit);
}

bool is_collision_free(const Graph& g, std::span<const int> subset) {
    for (std::size_t a = 0; a < subset.size(); ++a) {
        for (std::size_t b = a + 1; b < subset.size(); ++b) {
            const int i = subset[a];
            const int j = subset[b];
            if (i == j || g.adjacent(i, j)) {
                return false;
            }
            const auto& ni = g.neighbors(i);
            const auto& nj = g.neighbors(j);
            std::vector<int> common;
            std::set_intersection(ni.begin(), ni.end(), nj.begin(), nj.end(), std::back_inserter(common));
            if (!common.empty()) {
                return false;
            }
        }
    }
    return true;
}

bool is_valid_partition(const Graph& g, const Partition& p) {
    std::vector<int> hits(static_cast<std::size_t>(g.size()), 0);
    for (const auto& s : p.subsets) {
        for (int i : s) {
            if (i < 0 || i >= g.size()) {
                return false;
            }
            ++hits[static_cast<std::size_t>(i)];
        }
        if (!is_collision_free(g, s)) {
            return false;
        }
    }
    return std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; });
}

Matrix laplacian(const Graph& g) {
    Matrix l = -g.adjacency();
    for (int i = 0; i < g.size(); ++i) {
        l(i, i) = g.degree(i);
    }
    return l;
}

double algebraic_connectivity(const Matrix& m) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument("algebraic_connectivity: matrix is not square");
    }
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff())) {
        throw std::invalid_argument("algebraic_connectivity: matrix is not symmetric");
    }
    if (m.rows() < 2) {
        return 0.0;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(1);
}

double density(const Graph& g) {
    const double n = g.size();
    if (g.size() < 2) {
        throw std::invalid_argument("density: need at least two nodes");
    }
    return 2.0 * static_cast<double>(g.edges().size()) / (n * (n - 1.0));
}

bool connected(const Matrix& adjacency) {
    const auto n = adjacency.rows();
    if (n <= 1) {
        return true;
    }
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::queue<Eigen::Index> frontier;
    frontier.push(0);
    seen[0] = 1;
    Eigen::Index reached = 1;
    while (!frontier.empty()) {
        const auto v = frontier.front();
        frontier.pop();
        for (Eigen::Index w = 0; w < n; ++w) {
            if (w != v && adjacency(v, w) != 0.0 && !seen[static_cast<std::size_t>(w)]) {
                seen[static_cast<std::size_t>(w)] = 1;
                ++reached;
                frontier.push(w);
            }
        }
    }
    return reached == n;
}

}  // namespace bass
