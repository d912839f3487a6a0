#pragma once

#include <vector>

#include "bass/graph.hpp"

namespace bass {

/// Unnormalized betweenness centrality over unordered source/target pairs,
/// endpoints excluded. Brandes accumulation with one BFS per source; sources
/// run in parallel and are reduced in source order, so the result does not
/// depend on the thread count. Throws std::invalid_argument if `g` is
/// disconnected.
std::vector<double> betweenness(const Graph& g);

namespace reference {

/// Serial Brandes accumulation, kept as the baseline for `betweenness`.
std::vector<double> betweenness(const Graph& g);

}  // namespace reference

}  // namespace bass
