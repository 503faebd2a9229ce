#include "blobgraph/graph/graph_store.hpp"

#include <algorithm>

#include "blobgraph/common/error.hpp"

namespace blobgraph {

const char* direction_name(Direction d) noexcept {
  switch (d) {
    case Direction::Out: return "OUT";
    case Direction::In: return "IN";
    case Direction::Both: return "BOTH";
  }
  return "?";
}

std::uint64_t GraphStats::label_count(std::string_view label) const {
  auto it = label_counts.find(std::string(label));
  return it == label_counts.end() ? 0 : it->second;
}

std::uint64_t GraphStats::rel_type_count(std::string_view type) const {
  auto it = rel_type_counts.find(std::string(type));
  return it == rel_type_counts.end() ? 0 : it->second;
}

// ---------------------------------------------------------------------------
// PropertyIndex

void PropertyIndex::erase(const Value& v, NodeId n) {
  auto it = entries_.find(v);
  if (it == entries_.end()) return;
  it->second.erase(n);
  if (it->second.empty()) entries_.erase(it);
}

std::vector<NodeId> PropertyIndex::equal(const Value& v) const {
  auto it = entries_.find(v);
  if (it == entries_.end()) return {};
  return {it->second.begin(), it->second.end()};
}

std::vector<NodeId> PropertyIndex::range(const std::optional<Value>& lo, bool lo_inclusive,
                                         const std::optional<Value>& hi,
                                         bool hi_inclusive) const {
  auto first = entries_.begin();
  auto last = entries_.end();
  if (lo) first = lo_inclusive ? entries_.lower_bound(*lo) : entries_.upper_bound(*lo);
  if (hi) last = hi_inclusive ? entries_.upper_bound(*hi) : entries_.lower_bound(*hi);
  std::vector<NodeId> out;
  for (auto it = first; it != last && it != entries_.end(); ++it) {
    // Ranges never cross value domains: 'a' < 5 is not true in a query.
    if (lo && !value_compare(it->first, *lo)) continue;
    if (hi && !value_compare(it->first, *hi)) continue;
    out.insert(out.end(), it->second.begin(), it->second.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// GraphStore: copy/move (the scan counter is not copyable)

GraphStore::GraphStore(const GraphStore& o)
    : interner_(o.interner_),
      nodes_(o.nodes_),
      rels_(o.rels_),
      live_nodes_(o.live_nodes_),
      live_rels_(o.live_rels_),
      label_counts_(o.label_counts_),
      type_counts_(o.type_counts_),
      indexes_(o.indexes_),
      scanned_(o.scanned_.load()) {}

GraphStore& GraphStore::operator=(const GraphStore& o) {
  if (this != &o) {
    GraphStore copy(o);
    *this = std::move(copy);
  }
  return *this;
}

GraphStore::GraphStore(GraphStore&& o) noexcept
    : interner_(std::move(o.interner_)),
      nodes_(std::move(o.nodes_)),
      rels_(std::move(o.rels_)),
      live_nodes_(o.live_nodes_),
      live_rels_(o.live_rels_),
      label_counts_(std::move(o.label_counts_)),
      type_counts_(std::move(o.type_counts_)),
      indexes_(std::move(o.indexes_)),
      scanned_(o.scanned_.load()) {}

GraphStore& GraphStore::operator=(GraphStore&& o) noexcept {
  interner_ = std::move(o.interner_);
  nodes_ = std::move(o.nodes_);
  rels_ = std::move(o.rels_);
  live_nodes_ = o.live_nodes_;
  live_rels_ = o.live_rels_;
  label_counts_ = std::move(o.label_counts_);
  type_counts_ = std::move(o.type_counts_);
  indexes_ = std::move(o.indexes_);
  scanned_.store(o.scanned_.load());
  return *this;
}

// ---------------------------------------------------------------------------
// record access

GraphStore::NodeRecord& GraphStore::node_rec(NodeId n) {
  if (n.value == 0 || n.value > nodes_.size() || !nodes_[n.value - 1].live) {
    raise(ErrorCode::UnknownNode, "node " + std::to_string(n.value));
  }
  return nodes_[n.value - 1];
}

const GraphStore::NodeRecord& GraphStore::node_rec(NodeId n) const {
  return const_cast<GraphStore*>(this)->node_rec(n);
}

GraphStore::RelRecord& GraphStore::rel_rec(RelId r) {
  if (r.value == 0 || r.value > rels_.size() || !rels_[r.value - 1].live) {
    raise(ErrorCode::UnknownRel, "relationship " + std::to_string(r.value));
  }
  return rels_[r.value - 1];
}

const GraphStore::RelRecord& GraphStore::rel_rec(RelId r) const {
  return const_cast<GraphStore*>(this)->rel_rec(r);
}

bool GraphStore::has_node(NodeId n) const noexcept {
  return n.value != 0 && n.value <= nodes_.size() && nodes_[n.value - 1].live;
}

bool GraphStore::has_rel(RelId r) const noexcept {
  return r.value != 0 && r.value <= rels_.size() && rels_[r.value - 1].live;
}

// ---------------------------------------------------------------------------
// mutation

namespace {

void check_text(const Value& v) {
  if (auto* s = std::get_if<std::string>(&v); s && !is_valid_utf8(*s)) {
    raise(ErrorCode::KindMismatch, "text property is not valid UTF-8");
  }
}

}  // namespace

NodeId GraphStore::create_node(const std::vector<std::string>& labels, const Properties& props) {
  for (const auto& [k, v] : props) check_text(v);
  NodeRecord rec;
  rec.live = true;
  for (const auto& l : labels) rec.labels.push_back(interner_.intern(l));
  std::sort(rec.labels.begin(), rec.labels.end());
  rec.labels.erase(std::unique(rec.labels.begin(), rec.labels.end()), rec.labels.end());
  for (const auto& [k, v] : props) rec.props[interner_.intern(k)] = v;
  for (Symbol l : rec.labels) ++label_counts_[l];
  nodes_.push_back(std::move(rec));
  ++live_nodes_;
  NodeId id{nodes_.size()};
  index_node(id, true);
  return id;
}

RelId GraphStore::create_rel(NodeId src, NodeId tgt, std::string_view type,
                             const Properties& props) {
  node_rec(src);
  node_rec(tgt);
  for (const auto& [k, v] : props) check_text(v);
  RelRecord rec;
  rec.live = true;
  rec.type = interner_.intern(type);
  rec.src = src;
  rec.tgt = tgt;
  for (const auto& [k, v] : props) rec.props[interner_.intern(k)] = v;
  ++type_counts_[rec.type];
  rels_.push_back(std::move(rec));
  ++live_rels_;
  RelId id{rels_.size()};
  nodes_[src.value - 1].out.push_back(id);
  nodes_[tgt.value - 1].in.push_back(id);
  return id;
}

void GraphStore::delete_rel(RelId r) {
  auto& rec = rel_rec(r);
  auto drop = [r](std::vector<RelId>& list) {
    auto it = std::lower_bound(list.begin(), list.end(), r);
    if (it != list.end() && *it == r) list.erase(it);
  };
  drop(nodes_[rec.src.value - 1].out);
  drop(nodes_[rec.tgt.value - 1].in);
  if (--type_counts_[rec.type] == 0) type_counts_.erase(rec.type);
  rec.live = false;
  rec.props.clear();
  --live_rels_;
}

void GraphStore::delete_node(NodeId n) {
  auto& rec = node_rec(n);
  std::vector<RelId> incident = rec.out;
  incident.insert(incident.end(), rec.in.begin(), rec.in.end());
  std::sort(incident.begin(), incident.end());
  incident.erase(std::unique(incident.begin(), incident.end()), incident.end());
  for (RelId r : incident) delete_rel(r);
  index_node(n, false);
  for (Symbol l : rec.labels) {
    if (--label_counts_[l] == 0) label_counts_.erase(l);
  }
  rec = NodeRecord{};
  --live_nodes_;
}

void GraphStore::add_label(NodeId n, std::string_view label) {
  auto& rec = node_rec(n);
  Symbol l = interner_.intern(label);
  auto it = std::lower_bound(rec.labels.begin(), rec.labels.end(), l);
  if (it != rec.labels.end() && *it == l) return;
  index_node(n, false);
  rec.labels.insert(it, l);
  ++label_counts_[l];
  index_node(n, true);
}

void GraphStore::set_property(NodeId n, std::string_view key, Value v) {
  check_text(v);
  auto& rec = node_rec(n);
  Symbol k = interner_.intern(key);
  if (auto it = rec.props.find(k); it != rec.props.end()) index_value(n, k, it->second, false);
  rec.props[k] = v;
  index_value(n, k, v, true);
}

void GraphStore::set_property(RelId r, std::string_view key, Value v) {
  check_text(v);
  auto& rec = rel_rec(r);
  rec.props[interner_.intern(key)] = std::move(v);
}

void GraphStore::remove_property(NodeId n, std::string_view key) {
  auto& rec = node_rec(n);
  auto k = interner_.find(key);
  if (!k) return;
  auto it = rec.props.find(*k);
  if (it == rec.props.end()) return;
  index_value(n, *k, it->second, false);
  rec.props.erase(it);
}

// ---------------------------------------------------------------------------
// lookup

std::vector<std::string> GraphStore::labels(NodeId n) const {
  std::vector<std::string> out;
  for (Symbol l : node_rec(n).labels) out.push_back(interner_.name(l));
  std::sort(out.begin(), out.end());
  return out;
}

bool GraphStore::has_label(NodeId n, Symbol label) const {
  const auto& ls = node_rec(n).labels;
  return std::binary_search(ls.begin(), ls.end(), label);
}

std::string GraphStore::rel_type(RelId r) const { return interner_.name(rel_rec(r).type); }
Symbol GraphStore::rel_type_symbol(RelId r) const { return rel_rec(r).type; }
NodeId GraphStore::src(RelId r) const { return rel_rec(r).src; }
NodeId GraphStore::tgt(RelId r) const { return rel_rec(r).tgt; }

std::optional<Value> GraphStore::get_property(NodeId n, std::string_view key) const {
  const auto& rec = node_rec(n);
  auto k = interner_.find(key);
  if (!k) return std::nullopt;
  auto it = rec.props.find(*k);
  if (it == rec.props.end()) return std::nullopt;
  return it->second;
}

std::optional<Value> GraphStore::get_property(RelId r, std::string_view key) const {
  const auto& rec = rel_rec(r);
  auto k = interner_.find(key);
  if (!k) return std::nullopt;
  auto it = rec.props.find(*k);
  if (it == rec.props.end()) return std::nullopt;
  return it->second;
}

const Value* GraphStore::find_property(NodeId n, Symbol key) const {
  const auto& props = node_rec(n).props;
  auto it = props.find(key);
  return it == props.end() ? nullptr : &it->second;
}

const Value* GraphStore::find_property(RelId r, Symbol key) const {
  const auto& props = rel_rec(r).props;
  auto it = props.find(key);
  return it == props.end() ? nullptr : &it->second;
}

Properties GraphStore::properties(NodeId n) const {
  Properties out;
  for (const auto& [k, v] : node_rec(n).props) out.emplace(interner_.name(k), v);
  return out;
}

Properties GraphStore::properties(RelId r) const {
  Properties out;
  for (const auto& [k, v] : rel_rec(r).props) out.emplace(interner_.name(k), v);
  return out;
}

void GraphStore::for_each_adjacent(NodeId n, Direction dir, std::optional<Symbol> type,
                                   const std::function<void(Adjacent)>& fn) const {
  const auto& rec = node_rec(n);
  auto emit = [&](RelId r, bool outgoing) {
    const auto& rr = rels_[r.value - 1];
    if (type && rr.type != *type) return;
    fn(Adjacent{r, outgoing ? rr.tgt : rr.src});
  };
  if (dir == Direction::Out) {
    for (RelId r : rec.out) emit(r, true);
  } else if (dir == Direction::In) {
    for (RelId r : rec.in) emit(r, false);
  } else {
    // Merge both lists by rel id; a self-loop sits in both and is reported once.
    std::size_t i = 0, j = 0;
    while (i < rec.out.size() || j < rec.in.size()) {
      if (j == rec.in.size() || (i < rec.out.size() && rec.out[i] < rec.in[j])) {
        emit(rec.out[i++], true);
      } else if (i == rec.out.size() || rec.in[j] < rec.out[i]) {
        emit(rec.in[j++], false);
      } else {
        emit(rec.out[i++], true);
        ++j;
      }
    }
  }
}

std::vector<Adjacent> GraphStore::expand(NodeId n, Direction dir,
                                         std::optional<std::string_view> type) const {
  std::optional<Symbol> sym;
  if (type) {
    sym = interner_.find(*type);
    if (!sym) {
      node_rec(n);
      return {};
    }
  }
  std::vector<Adjacent> out;
  for_each_adjacent(n, dir, sym, [&](Adjacent a) { out.push_back(a); });
  return out;
}

std::size_t GraphStore::degree(NodeId n, Direction dir) const {
  const auto& rec = node_rec(n);
  switch (dir) {
    case Direction::Out: return rec.out.size();
    case Direction::In: return rec.in.size();
    case Direction::Both: break;
  }
  std::size_t loops = 0;
  for (RelId r : rec.out) {
    if (rels_[r.value - 1].tgt == n) ++loops;
  }
  return rec.out.size() + rec.in.size() - loops;
}

std::vector<NodeId> GraphStore::scan(std::optional<std::string_view> label) const {
  std::vector<NodeId> out;
  std::optional<Symbol> sym;
  if (label) {
    sym = interner_.find(*label);
    if (!sym) return out;
  }
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& rec = nodes_[i];
    if (!rec.live) continue;
    scanned_.fetch_add(1, std::memory_order_relaxed);
    if (sym && !std::binary_search(rec.labels.begin(), rec.labels.end(), *sym)) continue;
    out.emplace_back(i + 1);
  }
  return out;
}

void GraphStore::for_each_node(const std::function<void(NodeId)>& fn) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!nodes_[i].live) continue;
    scanned_.fetch_add(1, std::memory_order_relaxed);
    fn(NodeId{i + 1});
  }
}

void GraphStore::for_each_rel(const std::function<void(RelId)>& fn) const {
  for (std::size_t i = 0; i < rels_.size(); ++i) {
    if (rels_[i].live) fn(RelId{i + 1});
  }
}

GraphStats GraphStore::stats() const {
  GraphStats s;
  s.node_count = live_nodes_;
  s.rel_count = live_rels_;
  for (const auto& [l, c] : label_counts_) s.label_counts[interner_.name(l)] = c;
  for (const auto& [t, c] : type_counts_) s.rel_type_counts[interner_.name(t)] = c;
  s.avg_out_degree = live_nodes_ == 0 ? 0.0 : static_cast<double>(live_rels_) / live_nodes_;
  return s;
}

// ---------------------------------------------------------------------------
// property indexes

void GraphStore::index_value(NodeId n, Symbol key, const Value& v, bool insert) {
  if (indexes_.empty()) return;
  for (Symbol l : nodes_[n.value - 1].labels) {
    auto it = indexes_.find({l, key});
    if (it == indexes_.end()) continue;
    if (insert) {
      it->second.insert(v, n);
    } else {
      it->second.erase(v, n);
    }
  }
}

void GraphStore::index_node(NodeId n, bool insert) {
  if (indexes_.empty()) return;
  for (const auto& [k, v] : nodes_[n.value - 1].props) index_value(n, k, v, insert);
}

void GraphStore::create_index(std::string_view label, std::string_view key) {
  IndexKey ik{interner_.intern(label), interner_.intern(key)};
  if (indexes_.count(ik)) return;
  PropertyIndex idx;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& rec = nodes_[i];
    if (!rec.live || !std::binary_search(rec.labels.begin(), rec.labels.end(), ik.first)) continue;
    if (auto it = rec.props.find(ik.second); it != rec.props.end()) {
      idx.insert(it->second, NodeId{i + 1});
    }
  }
  indexes_.emplace(ik, std::move(idx));
}

bool GraphStore::has_index(std::string_view label, std::string_view key) const {
  return index(label, key) != nullptr;
}

const PropertyIndex* GraphStore::index(std::string_view label, std::string_view key) const {
  auto l = interner_.find(label);
  auto k = interner_.find(key);
  if (!l || !k) return nullptr;
  auto it = indexes_.find({*l, *k});
  return it == indexes_.end() ? nullptr : &it->second;
}

std::vector<std::pair<std::string, std::string>> GraphStore::index_definitions() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [ik, idx] : indexes_) {
    out.emplace_back(interner_.name(ik.first), interner_.name(ik.second));
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// snapshot restore

void GraphStore::reserve_ids(std::uint64_t next_node, std::uint64_t next_rel) {
  if (next_node == 0 || next_rel == 0 || next_node - 1 < nodes_.size() ||
      next_rel - 1 < rels_.size()) {
    raise(ErrorCode::CorruptFile, "id allocator moves backwards");
  }
  nodes_.resize(next_node - 1);
  rels_.resize(next_rel - 1);
}

void GraphStore::restore_node(NodeId id, const std::vector<std::string>& labels) {
  if (id.value <= nodes_.size()) raise(ErrorCode::CorruptFile, "node ids out of order");
  nodes_.resize(id.value - 1);
  create_node(labels);
}

void GraphStore::restore_rel(RelId id, NodeId src, NodeId tgt, std::string_view type) {
  if (id.value <= rels_.size()) raise(ErrorCode::CorruptFile, "relationship ids out of order");
  rels_.resize(id.value - 1);
  try {
    create_rel(src, tgt, type);
  } catch (const Error&) {
    raise(ErrorCode::CorruptFile, "relationship endpoint missing");
  }
}

}  // namespace blobgraph
