#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "blobgraph/exec/datum.hpp"
#include "blobgraph/graph/graph_store.hpp"

namespace blobgraph {

// Minimum-hop path from a to b ignoring relationship direction, at most
// max_hops long. Among minimum paths the lexicographically smallest node-id
// sequence wins, then the smallest relationship ids. a == b yields the
// zero-length path only when min_hops is 0. UnknownNode if either end is
// missing.
std::optional<Path> shortest_path(const GraphStore& g, NodeId a, NodeId b, std::uint32_t min_hops,
                                  std::uint32_t max_hops, std::optional<std::string_view> rel_type = std::nullopt);

}  // namespace blobgraph
