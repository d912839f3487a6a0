#include "bass/centrality.hpp"

#include <stdexcept>

namespace bass {

namespace {

// Dependency of `source` on every node (Brandes), halved later for unordered pairs.
void accumulate_source(const Graph& g, int source, std::vector<double>& delta, std::vector<int>& dist,
                       std::vector<double>& sigma, std::vector<int>& stack, std::vector<int>& queue) {
    const int n = g.size();
    dist.assign(static_cast<std::size_t>(n), -1);
    sigma.assign(static_cast<std::size_t>(n), 0.0);
    delta.assign(static_cast<std::size_t>(n), 0.0);
    stack.clear();
    queue.clear();

    dist[static_cast<std::size_t>(source)] = 0;
    sigma[static_cast<std::size_t>(source)] = 1.0;
    queue.push_back(source);
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const int v = queue[head];
        stack.push_back(v);
        for (int w : g.neighbors(v)) {
            auto& dw = dist[static_cast<std::size_t>(w)];
            if (dw < 0) {
                dw = dist[static_cast<std::size_t>(v)] + 1;
                queue.push_back(w);
            }
            if (dw == dist[static_cast<std::size_t>(v)] + 1) {
                sigma[static_cast<std::size_t>(w)] += sigma[static_cast<std::size_t>(v)];
            }
        }
    }
    for (auto it = stack.rbegin(); it != stack.rend(); ++it) {
        const int w = *it;
        for (int v : g.neighbors(w)) {
            if (dist[static_cast<std::size_t>(v)] == dist[static_cast<std::size_t>(w)] - 1) {
                delta[static_cast<std::size_t>(v)] += sigma[static_cast<std::size_t>(v)] /
                                                      sigma[static_cast<std::size_t>(w)] *
                                                      (1.0 + delta[static_cast<std::size_t>(w)]);
            }
        }
    }
    delta[static_cast<std::size_t>(source)] = 0.0;
}

void require_connected(const Graph& g) {
    if (!g.connected()) {
        throw std::invalid_argument("betweenness: graph is disconnected");
    }
}

}  // namespace

std::vector<double> betweenness(const Graph& g) {
    require_connected(g);
    const int n = g.size();
    std::vector<std::vector<double>> per_source(static_cast<std::size_t>(n));

#pragma omp parallel
    {
        std::vector<int> dist, stack, queue;
        std::vector<double> sigma;
#pragma omp for schedule(dynamic)
        for (int s = 0; s < n; ++s) {
            accumulate_source(g, s, per_source[static_cast<std::size_t>(s)], dist, sigma, stack, queue);
        }
    }

    std::vector<double> b(static_cast<std::size_t>(n), 0.0);
    for (const auto& delta : per_source) {
        for (int v = 0; v < n; ++v) {
            b[static_cast<std::size_t>(v)] += delta[static_cast<std::size_t>(v)];
        }
    }
    for (double& x : b) x *= 0.5;
    return b;
}

namespace reference {

std::vector<double> betweenness(const Graph& g) {
    require_connected(g);
    const int n = g.size();
    std::vector<double> b(static_cast<std::size_t>(n), 0.0);
    std::vector<double> delta, sigma;
    std::vector<int> dist, stack, queue;
    for (int s = 0; s < n; ++s) {
        accumulate_source(g, s, delta, dist, sigma, stack, queue);
        for (int v = 0; v < n; ++v) {
            b[static_cast<std::size_t>(v)] += delta[static_cast<std::size_t>(v)];
        }
    }
    for (double& x : b) x *= 0.5;
    return b;
}

}  // namespace reference

}  // namespace bass
