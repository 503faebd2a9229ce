#pragma once

// Property graph store with index-free adjacency.
//
// Every node keeps its own outgoing and incoming relationship lists, so an
// expand costs O(degree) and never touches a global index. Ids are dense,
// start at 1, are allocated in ascending order and are never reused; deleted
// slots stay as tombstones. All iteration is in ascending id order.
//
// The store itself is not synchronized. Database wraps it in a
// single-writer / multi-reader lock.

#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "blobgraph/common/ids.hpp"
#include "blobgraph/graph/interner.hpp"
#include "blobgraph/graph/value.hpp"

namespace blobgraph {

enum class Direction : std::uint8_t { Out, In, Both };

const char* direction_name(Direction d) noexcept;

struct Adjacent {
  RelId rel;
  NodeId node;
  friend bool operator==(const Adjacent&, const Adjacent&) = default;
};

using Properties = std::map<std::string, Value>;

struct GraphStats {
  std::uint64_t node_count = 0;
  std::uint64_t rel_count = 0;
  std::map<std::string, std::uint64_t> label_counts;
  std::map<std::string, std::uint64_t> rel_type_counts;
  double avg_out_degree = 0.0;

  std::uint64_t label_count(std::string_view label) const;
  std::uint64_t rel_type_count(std::string_view type) const;
};

// Ordered index over (label, key); serves equality and range lookups.
class PropertyIndex {
 public:
  void insert(const Value& v, NodeId n) { entries_[v].insert(n); }
  void erase(const Value& v, NodeId n);
  std::vector<NodeId> equal(const Value& v) const;
  // Bounds are optional; a missing bound is unbounded on that side.
  std::vector<NodeId> range(const std::optional<Value>& lo, bool lo_inclusive,
                            const std::optional<Value>& hi, bool hi_inclusive) const;
  std::size_t distinct_values() const noexcept { return entries_.size(); }

 private:
  std::map<Value, std::set<NodeId>, ValueLess> entries_;
};

class GraphStore {
 public:
  GraphStore() = default;
  GraphStore(const GraphStore& other);
  GraphStore& operator=(const GraphStore& other);
  GraphStore(GraphStore&&) noexcept;
  GraphStore& operator=(GraphStore&&) noexcept;

  // ---- mutation ----
  NodeId create_node(const std::vector<std::string>& labels, const Properties& props = {});
  RelId create_rel(NodeId src, NodeId tgt, std::string_view type, const Properties& props = {});
  // Detach-delete: incident relationships are removed too.
  void delete_node(NodeId n);
  void delete_rel(RelId r);
  void add_label(NodeId n, std::string_view label);
  void set_property(NodeId n, std::string_view key, Value v);
  void set_property(RelId r, std::string_view key, Value v);
  void remove_property(NodeId n, std::string_view key);

  // ---- lookup ----
  bool has_node(NodeId n) const noexcept;
  bool has_rel(RelId r) const noexcept;
  std::vector<std::string> labels(NodeId n) const;
  bool has_label(NodeId n, Symbol label) const;
  std::string rel_type(RelId r) const;
  Symbol rel_type_symbol(RelId r) const;
  NodeId src(RelId r) const;
  NodeId tgt(RelId r) const;
  std::optional<Value> get_property(NodeId n, std::string_view key) const;
  std::optional<Value> get_property(RelId r, std::string_view key) const;
  const Value* find_property(NodeId n, Symbol key) const;
  const Value* find_property(RelId r, Symbol key) const;
  Properties properties(NodeId n) const;
  Properties properties(RelId r) const;

  // Adjacent (relationship, neighbour) pairs in ascending relationship id.
  // A self-loop is reported once for Direction::Both.
  std::vector<Adjacent> expand(NodeId n, Direction dir,
                               std::optional<std::string_view> type = std::nullopt) const;
  void for_each_adjacent(NodeId n, Direction dir, std::optional<Symbol> type,
                         const std::function<void(Adjacent)>& fn) const;
  std::size_t degree(NodeId n, Direction dir) const;

  std::vector<NodeId> scan(std::optional<std::string_view> label = std::nullopt) const;
  void for_each_node(const std::function<void(NodeId)>& fn) const;
  void for_each_rel(const std::function<void(RelId)>& fn) const;

  GraphStats stats() const;
  std::uint64_t node_count() const noexcept { return live_nodes_; }
  std::uint64_t rel_count() const noexcept { return live_rels_; }

  // ---- property indexes ----
  void create_index(std::string_view label, std::string_view key);
  bool has_index(std::string_view label, std::string_view key) const;
  const PropertyIndex* index(std::string_view label, std::string_view key) const;
  std::vector<std::pair<std::string, std::string>> index_definitions() const;

  // ---- interning ----
  Symbol intern(std::string_view text) { return interner_.intern(text); }
  std::optional<Symbol> symbol(std::string_view text) const { return interner_.find(text); }
  const std::string& name(Symbol s) const { return interner_.name(s); }

  // Nodes yielded by scan()/for_each_node since construction. Instrumentation
  // for the pushdown path.
  std::uint64_t scanned_nodes() const noexcept { return scanned_.load(); }

  // Next ids to be allocated; exposed for snapshots.
  std::uint64_t next_node_id() const noexcept { return nodes_.size() + 1; }
  std::uint64_t next_rel_id() const noexcept { return rels_.size() + 1; }

  // Snapshot restore: recreate an entity at an exact id, leaving tombstones
  // for skipped ids.
  void restore_node(NodeId id, const std::vector<std::string>& labels);
  void restore_rel(RelId id, NodeId src, NodeId tgt, std::string_view type);
  void reserve_ids(std::uint64_t next_node, std::uint64_t next_rel);

 private:
  struct NodeRecord {
    bool live = false;
    std::vector<Symbol> labels;  // sorted
    std::map<Symbol, Value> props;
    std::vector<RelId> out;
    std::vector<RelId> in;
  };
  struct RelRecord {
    bool live = false;
    Symbol type;
    NodeId src;
    NodeId tgt;
    std::map<Symbol, Value> props;
  };
  using IndexKey = std::pair<Symbol, Symbol>;  // (label, key)

  NodeRecord& node_rec(NodeId n);
  const NodeRecord& node_rec(NodeId n) const;
  RelRecord& rel_rec(RelId r);
  const RelRecord& rel_rec(RelId r) const;
  void index_node(NodeId n, bool insert);
  void index_value(NodeId n, Symbol key, const Value& v, bool insert);

  Interner interner_;
  std::vector<NodeRecord> nodes_;  // slot i holds id i+1
  std::vector<RelRecord> rels_;
  std::uint64_t live_nodes_ = 0;
  std::uint64_t live_rels_ = 0;
  std::map<Symbol, std::uint64_t> label_counts_;
  std::map<Symbol, std::uint64_t> type_counts_;
  std::map<IndexKey, PropertyIndex> indexes_;
  mutable std::atomic<std::uint64_t> scanned_{0};
};

}  // namespace blobgraph
