#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "bass/graph.hpp"

namespace bass {

enum class TopologyKind { geometric, erdos_renyi, two_stars, forest };

TopologyKind parse_topology_kind(std::string_view name);
std::string to_string(TopologyKind kind);

/// Connected random or fixed-family graph.
///
/// `param` is the connection radius for `geometric` (unit square) and the edge
/// probability for `erdos_renyi`; it is ignored by the fixed families.
/// Random families are redrawn with derived seeds until connected, at most
/// `kMaxTopologyAttempts` times, then std::runtime_error.
///
/// two_stars: hubs 0 and 1 joined through bridge node 2; the remaining nodes
/// alternate as leaves of hub 0 and hub 1 (n < 5 degrades to a path).
/// forest: a random spanning tree grown by attaching node i to a uniform
/// earlier node (connected, so a single tree).
Graph generate_topology(TopologyKind kind, int n, double param, std::uint64_t seed);

inline constexpr int kMaxTopologyAttempts = 1000;

}  // namespace bass
