#include "blobgraph/exec/shortest_path.hpp"

#include <deque>
#include <unordered_map>

#include "blobgraph/common/error.hpp"

namespace blobgraph {

std::optional<Path> shortest_path(const GraphStore& g, NodeId a, NodeId b, std::uint32_t min_hops,
                                  std::uint32_t max_hops, std::optional<std::string_view> rel_type) {
  if (!g.has_node(a)) raise(ErrorCode::UnknownNode, "node " + std::to_string(a.value));
  if (!g.has_node(b)) raise(ErrorCode::UnknownNode, "node " + std::to_string(b.value));
  if (a == b) {
    if (min_hops == 0) return Path{{a}, {}};
    return std::nullopt;
  }
  std::optional<Symbol> type;
  if (rel_type) {
    type = g.symbol(*rel_type);
    if (!type) return std::nullopt;
  }

  // Distances to b, so the walk from a can pick the smallest neighbour that
  // stays on some shortest path.
  std::unordered_map<NodeId, std::uint32_t> dist{{b, 0}};
  std::deque<NodeId> frontier{b};
  while (!frontier.empty() && !dist.count(a)) {
    NodeId cur = frontier.front();
    frontier.pop_front();
    std::uint32_t d = dist[cur];
    if (d == max_hops) continue;
    g.for_each_adjacent(cur, Direction::Both, type, [&](Adjacent adj) {
      if (dist.emplace(adj.node, d + 1).second) frontier.push_back(adj.node);
    });
  }
  auto it = dist.find(a);
  if (it == dist.end() || it->second < min_hops) return std::nullopt;

  Path path;
  path.nodes.push_back(a);
  NodeId cur = a;
  for (std::uint32_t left = it->second; left > 0; --left) {
    std::optional<Adjacent> best;
    g.for_each_adjacent(cur, Direction::Both, type, [&](Adjacent adj) {
      auto d = dist.find(adj.node);
      if (d == dist.end() || d->second != left - 1) return;
      if (!best || adj.node < best->node || (adj.node == best->node && adj.rel < best->rel)) best = adj;
    });
    path.rels.push_back(best->rel);
    path.nodes.push_back(best->node);
    cur = best->node;
  }
  return path;
}

}  // namespace blobgraph
