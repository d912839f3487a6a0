#include "bass/topology.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "bass/rng.hpp"

namespace bass {

std::uint64_t derive_seed(std::uint64_t master, std::string_view label) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : label) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    std::uint64_t z = master ^ h;
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view label, std::uint64_t index) {
    return derive_seed(derive_seed(master, label) + index, "#");
}

TopologyKind parse_topology_kind(std::string_view name) {
    if (name == "geometric") return TopologyKind::geometric;
    if (name == "erdos_renyi" || name == "er") return TopologyKind::erdos_renyi;
    if (name == "two_stars") return TopologyKind::two_stars;
    if (name == "forest") return TopologyKind::forest;
    throw std::invalid_argument("unknown topology kind '" + std::string(name) + "'");
}

std::string to_string(TopologyKind kind) {
    switch (kind) {
        case TopologyKind::geometric: return "geometric";
        case TopologyKind::erdos_renyi: return "erdos_renyi";
        case TopologyKind::two_stars: return "two_stars";
        case TopologyKind::forest: return "forest";
    }
    return "unknown";
}

namespace {

Graph two_stars(int n) {
    std::vector<Edge> edges;
    if (n < 5) {
        for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1});
        return Graph(n, edges);
    }
    edges.push_back({0, 2});
    edges.push_back({2, 1});
    for (int leaf = 3; leaf < n; ++leaf) {
        edges.push_back({(leaf - 3) % 2 == 0 ? 0 : 1, leaf});
    }
    return Graph(n, edges);
}

Graph draw_geometric(int n, double radius, Rng& rng) {
    std::vector<double> x(static_cast<std::size_t>(n)), y(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        x[static_cast<std::size_t>(i)] = uniform01(rng);
        y[static_cast<std::size_t>(i)] = uniform01(rng);
    }
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double dx = x[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(j)];
            const double dy = y[static_cast<std::size_t>(i)] - y[static_cast<std::size_t>(j)];
            if (std::hypot(dx, dy) <= radius) edges.push_back({i, j});
        }
    }
    return Graph(n, edges);
}

Graph draw_erdos_renyi(int n, double p, Rng& rng) {
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (p >= 1.0 || uniform01(rng) < p) edges.push_back({i, j});
        }
    }
    return Graph(n, edges);
}

Graph draw_tree(int n, Rng& rng) {
    std::vector<Edge> edges;
    for (int i = 1; i < n; ++i) {
        const int parent = static_cast<int>(uniform01(rng) * i);
        edges.push_back({parent, i});
    }
    return Graph(n, edges);
}

}  // namespace

Graph generate_topology(TopologyKind kind, int n, double param, std::uint64_t seed) {
    if (n < 2) {
        throw std::invalid_argument("generate_topology: need at least 2 nodes");
    }
    if (kind == TopologyKind::two_stars) {
        return two_stars(n);
    }
    if ((kind == TopologyKind::geometric && !(param > 0.0)) ||
        (kind == TopologyKind::erdos_renyi && !(param > 0.0 && param <= 1.0))) {
        throw std::invalid_argument("generate_topology: parameter out of range for " + to_string(kind));
    }
    for (int attempt = 0; attempt < kMaxTopologyAttempts; ++attempt) {
        Rng rng(derive_seed(seed, to_string(kind), static_cast<std::uint64_t>(attempt)));
        Graph g;
        switch (kind) {
            case TopologyKind::geometric: g = draw_geometric(n, param, rng); break;
            case TopologyKind::erdos_renyi: g = draw_erdos_renyi(n, param, rng); break;
            case TopologyKind::forest: g = draw_tree(n, rng); break;
            case TopologyKind::two_stars: break;
        }
        if (g.connected()) {
            return g;
        }
    }
    throw std::runtime_error("generate_topology: no connected " + to_string(kind) + " graph with n=" +
                             std::to_string(n) + " after " + std::to_string(kMaxTopologyAttempts) + " attempts");
}

}  // namespace bass
