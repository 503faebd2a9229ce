#include "blobgraph/exec/executor.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

#include "blobgraph/planner/optimizer.hpp"

namespace blobgraph {

using plan::LogicalOp;
using plan::OpKind;

const Clock& ExecContext::time() const {
  static const SteadyClock steady;
  return clock ? *clock : steady;
}

bool Operator::next(std::vector<Row>& out, std::size_t max) {
  out.clear();
  try {
    return produce(out, std::max<std::size_t>(max, 1));
  } catch (const OperatorError&) {
    throw;
  } catch (const Error& e) {
    std::string msg = e.what();
    auto p = msg.find(": ");
    throw OperatorError(e.code(), p == std::string::npos ? msg : msg.substr(p + 2), description_);
  }
}

namespace {

std::size_t slot_of(const std::vector<std::string>& schema, const std::string& var) {
  auto it = std::find(schema.begin(), schema.end(), var);
  if (it == schema.end()) raise(ErrorCode::UnboundVariable, "variable " + var + " is not produced by the input");
  return static_cast<std::size_t>(it - schema.begin());
}

// Label symbols that must all hold; nullopt entries never match.
std::vector<std::optional<Symbol>> label_symbols(const GraphStore& g, const std::vector<std::string>& labels) {
  std::vector<std::optional<Symbol>> out;
  for (const auto& l : labels) out.push_back(g.symbol(l));
  return out;
}

bool has_labels(const GraphStore& g, NodeId n, const std::vector<std::optional<Symbol>>& labels) {
  for (const auto& l : labels) {
    if (!l || !g.has_label(n, *l)) return false;
  }
  return true;
}

// Operators whose output per input row is unbounded queue it here and hand it
// out in slices.
class Streaming : public Operator {
 public:
  using Operator::Operator;

 protected:
  // Appends to pending_. False once the input is exhausted. `wanted` is how
  // many rows the caller still asks for; one-to-one operators pass it down.
  virtual bool refill(std::size_t wanted) = 0;

  bool produce(std::vector<Row>& out, std::size_t max) override {
    while (out.size() < max) {
      if (pos_ == pending_.size()) {
        pending_.clear();
        pos_ = 0;
        if (done_) break;
        if (!refill(max - out.size())) done_ = true;
        continue;
      }
      out.push_back(std::move(pending_[pos_++]));
    }
    return !out.empty();
  }

  std::vector<Row> pending_;

 private:
  std::size_t pos_ = 0;
  bool done_ = false;
};

class UnitOp final : public Streaming {
 public:
  explicit UnitOp(std::string d) : Streaming(std::move(d), {}) {}

 protected:
  bool refill(std::size_t) override {
    pending_.emplace_back();
    return false;
  }
};

// Hands out a precomputed id list.
class NodeListOp : public Streaming {
 public:
  NodeListOp(std::string d, std::string var, ExecContext& ctx)
      : Streaming(std::move(d), {std::move(var)}), ctx_(ctx) {}

 protected:
  virtual std::vector<NodeId> load() = 0;

  bool refill(std::size_t) override {
    if (!loaded_) {
      ids_ = load();
      loaded_ = true;
    }
    std::size_t n = std::min(ctx_.options.batch_size, ids_.size() - pos_);
    for (std::size_t i = 0; i < n; ++i) pending_.push_back(Row{ids_[pos_ + i]});
    pos_ += n;
    return pos_ < ids_.size();
  }

  ExecContext& ctx_;

 private:
  std::vector<NodeId> ids_;
  std::size_t pos_ = 0;
  bool loaded_ = false;
};

class ScanOp final : public NodeListOp {
 public:
  ScanOp(std::string d, std::string var, std::vector<std::string> labels, ExecContext& ctx)
      : NodeListOp(std::move(d), std::move(var), ctx), labels_(std::move(labels)) {}

 protected:
  std::vector<NodeId> load() override {
    const GraphStore& g = *ctx_.graph;
    if (labels_.empty()) return g.scan();
    auto ids = g.scan(labels_.front());
    if (labels_.size() > 1) {
      auto syms = label_symbols(g, labels_);
      std::erase_if(ids, [&](NodeId n) { return !has_labels(g, n, syms); });
    }
    return ids;
  }

 private:
  std::vector<std::string> labels_;
};

class IndexSeekOp final : public NodeListOp {
 public:
  IndexSeekOp(std::string d, std::string var, std::vector<std::string> labels, query::ExprPtr pred, ExecContext& ctx)
      : NodeListOp(std::move(d), var, ctx), var_(std::move(var)), labels_(std::move(labels)), pred_(std::move(pred)) {}

 protected:
  std::vector<NodeId> load() override { return pushdown_filter(*pred_, var_, labels_, ctx_); }

 private:
  std::string var_;
  std::vector<std::string> labels_;
  query::ExprPtr pred_;
};

class FilterOp final : public Streaming {
 public:
  FilterOp(std::string d, OperatorPtr child, query::ExprPtr pred, ExecContext& ctx,
           std::shared_ptr<QueryScratch> scratch)
      : Streaming(std::move(d), child->schema()),
        child_(std::move(child)),
        pred_(std::move(pred)),
        ctx_(ctx),
        ev_(ctx, schema(), std::move(scratch)) {}

 protected:
  bool refill(std::size_t) override {
    if (!child_->next(in_, ctx_.options.batch_size)) return false;
    for (auto& row : in_) {
      if (ctx_.options.structured_row_work) ctx_.options.structured_row_work();
      if (ev_.truth(*pred_, row) == true) pending_.push_back(std::move(row));
    }
    return true;
  }

 private:
  OperatorPtr child_;
  query::ExprPtr pred_;
  ExecContext& ctx_;
  Evaluator ev_;
  std::vector<Row> in_;
};

// Evaluates rows in windows no larger than the extraction in-flight limit or
// the rows still wanted, starting each window's extractions before
// evaluating it. A LIMIT above this operator thus bounds the extractions.
class UnstructuredFilterOp final : public Operator {
 public:
  UnstructuredFilterOp(std::string d, OperatorPtr child, query::ExprPtr pred, std::string filter_id,
                       ExecContext& ctx, std::shared_ptr<QueryScratch> scratch)
      : Operator(std::move(d), child->schema()),
        child_(std::move(child)),
        pred_(std::move(pred)),
        filter_id_(std::move(filter_id)),
        ctx_(ctx),
        ev_(ctx, schema(), std::move(scratch)) {}

 protected:
  bool produce(std::vector<Row>& out, std::size_t max) override {
    const Clock& clock = ctx_.time();
    std::size_t in_flight = ctx_.extraction ? std::max<std::size_t>(1, ctx_.extraction->options().max_in_flight) : 1;
    while (out.size() < max) {
      if (pos_ == in_.size()) {
        in_.clear();
        pos_ = 0;
        if (exhausted_ || !child_->next(in_, ctx_.options.batch_size)) {
          exhausted_ = true;
          flush();
          break;
        }
      }
      std::size_t window = std::min({in_flight, max - out.size(), in_.size() - pos_});
      double t0 = clock.now_secs();
      std::vector<std::shared_future<SemanticValue>> started;
      for (std::size_t i = 0; i < window; ++i) ev_.prefetch(*pred_, in_[pos_ + i], started);
      for (std::size_t i = 0; i < window; ++i) {
        Row& row = in_[pos_ + i];
        ++rows_;
        if (ev_.truth(*pred_, row) == true) out.push_back(std::move(row));
      }
      elapsed_ += clock.now_secs() - t0;
      pos_ += window;
    }
    return !out.empty();
  }

 private:
  void flush() {
    if (flushed_) return;
    flushed_ = true;
    if (ctx_.speeds && rows_ > 0) ctx_.speeds->record(filter_id_, std::max(0.0, elapsed_), rows_);
  }

  OperatorPtr child_;
  query::ExprPtr pred_;
  std::string filter_id_;
  ExecContext& ctx_;
  Evaluator ev_;
  std::vector<Row> in_;
  std::size_t pos_ = 0;
  bool exhausted_ = false;
  bool flushed_ = false;
  std::uint64_t rows_ = 0;
  double elapsed_ = 0.0;
};

std::vector<std::string> expand_schema(const std::vector<std::string>& in, const plan::ExpandSpec& e) {
  auto s = in;
  s.push_back(e.rel);
  if (!e.into) s.push_back(e.to);
  return s;
}

class ExpandOp final : public Streaming {
 public:
  ExpandOp(std::string d, OperatorPtr child, plan::ExpandSpec spec, std::vector<std::string> labels,
           ExecContext& ctx)
      : Streaming(std::move(d), expand_schema(child->schema(), spec)),
        child_(std::move(child)),
        spec_(std::move(spec)),
        ctx_(ctx) {
    const GraphStore& g = *ctx.graph;
    from_ = slot_of(child_->schema(), spec_.from);
    if (spec_.into) to_ = slot_of(child_->schema(), spec_.to);
    labels_ = label_symbols(g, labels);
    if (spec_.type) {
      type_ = g.symbol(*spec_.type);
      type_missing_ = !type_;
    }
  }

 protected:
  bool refill(std::size_t) override {
    if (!child_->next(in_, ctx_.options.batch_size)) return false;
    if (type_missing_) return true;
    const GraphStore& g = *ctx_.graph;
    for (const auto& row : in_) {
      const auto* from = std::get_if<NodeId>(&row[from_]);
      if (!from) continue;
      const NodeId* to = spec_.into ? std::get_if<NodeId>(&row[to_]) : nullptr;
      if (spec_.into && !to) continue;
      g.for_each_adjacent(*from, spec_.dir, type_, [&](Adjacent adj) {
        if (to) {
          if (adj.node != *to) return;
        } else if (!has_labels(g, adj.node, labels_)) {
          return;
        }
        Row r = row;
        r.emplace_back(adj.rel);
        if (!to) r.emplace_back(adj.node);
        pending_.push_back(std::move(r));
      });
    }
    return true;
  }

 private:
  OperatorPtr child_;
  plan::ExpandSpec spec_;
  ExecContext& ctx_;
  std::size_t from_ = 0, to_ = 0;
  std::vector<std::optional<Symbol>> labels_;
  std::optional<Symbol> type_;
  bool type_missing_ = false;
  std::vector<Row> in_;
};

std::vector<std::string> join_schema(const std::vector<std::string>& l, const std::vector<std::string>& r) {
  auto s = l;
  for (const auto& v : r)
    if (std::find(l.begin(), l.end(), v) == l.end()) s.push_back(v);
  return s;
}

// Hash join on the shared variables; the right input is built, the left
// streamed. Without shared variables it is a cartesian product.
class JoinOp final : public Streaming {
 public:
  JoinOp(std::string d, OperatorPtr left, OperatorPtr right, const std::vector<std::string>& vars, ExecContext& ctx)
      : Streaming(std::move(d), join_schema(left->schema(), right->schema())),
        left_(std::move(left)),
        right_(std::move(right)),
        ctx_(ctx) {
    for (const auto& v : vars) {
      left_keys_.push_back(slot_of(left_->schema(), v));
      right_keys_.push_back(slot_of(right_->schema(), v));
    }
    const auto& ls = left_->schema();
    const auto& rs = right_->schema();
    for (std::size_t i = 0; i < rs.size(); ++i)
      if (std::find(ls.begin(), ls.end(), rs[i]) == ls.end()) right_extra_.push_back(i);
  }

 protected:
  bool refill(std::size_t) override {
    if (!built_) build();
    if (!left_->next(in_, ctx_.options.batch_size)) return false;
    for (const auto& row : in_) {
      auto key = key_of(row, left_keys_);
      if (!key) continue;
      auto it = table_.find(*key);
      if (it == table_.end()) continue;
      for (std::size_t ri : it->second) {
        Row r = row;
        for (std::size_t i : right_extra_) r.push_back(right_rows_[ri][i]);
        pending_.push_back(std::move(r));
      }
    }
    return true;
  }

 private:
  static std::optional<std::string> key_of(const Row& row, const std::vector<std::size_t>& slots) {
    std::string k;
    for (std::size_t s : slots) {
      if (is_null(row[s])) return std::nullopt;
      k += datum_key(row[s]);
      k += '\x1f';
    }
    return k;
  }

  void build() {
    built_ = true;
    std::vector<Row> batch;
    while (right_->next(batch, ctx_.options.batch_size)) {
      for (auto& row : batch) {
        auto key = key_of(row, right_keys_);
        if (!key) continue;
        table_[*key].push_back(right_rows_.size());
        right_rows_.push_back(std::move(row));
      }
    }
  }

  OperatorPtr left_, right_;
  ExecContext& ctx_;
  std::vector<std::size_t> left_keys_, right_keys_, right_extra_;
  bool built_ = false;
  std::vector<Row> right_rows_;
  std::unordered_map<std::string, std::vector<std::size_t>> table_;
  std::vector<Row> in_;
};

// Evaluates one expression per row and appends it as a new column, or, for
// a projection, replaces the row by the item values.
class ComputeOp final : public Streaming {
 public:
  ComputeOp(std::string d, std::vector<std::string> schema, OperatorPtr child, std::vector<query::ExprPtr> exprs,
            bool append, ExecContext& ctx, std::shared_ptr<QueryScratch> scratch, NamedPaths paths)
      : Streaming(std::move(d), std::move(schema)),
        child_(std::move(child)),
        exprs_(std::move(exprs)),
        append_(append),
        ctx_(ctx),
        ev_(ctx, child_->schema(), std::move(scratch), std::move(paths)) {}

 protected:
  bool refill(std::size_t wanted) override {
    if (!child_->next(in_, std::min(wanted, ctx_.options.batch_size))) return false;
    for (auto& row : in_) {
      Row r;
      if (append_) r = row;
      for (const auto& e : exprs_) r.push_back(ev_.eval(*e, row));
      pending_.push_back(std::move(r));
    }
    return true;
  }

 private:
  OperatorPtr child_;
  std::vector<query::ExprPtr> exprs_;
  bool append_;
  ExecContext& ctx_;
  Evaluator ev_;
  std::vector<Row> in_;
};

bool can_seek(const LogicalOp& filter, const LogicalOp& scan, const GraphStore& g) {
  if (scan.kind != OpKind::NodeByLabelScan) return false;
  auto form = plan::pushdown_form(*filter.pred, scan.var);
  if (!form) return false;
  return std::any_of(scan.labels.begin(), scan.labels.end(),
                     [&](const std::string& l) { return g.has_index(l, form->key); });
}

}  // namespace

OperatorPtr build_operator(const LogicalOp& op, ExecContext& ctx, std::shared_ptr<QueryScratch> scratch) {
  if (!ctx.graph) raise(ErrorCode::InvalidConfig, "execution context has no graph");
  if (!scratch) scratch = std::make_shared<QueryScratch>();
  std::string d = plan::describe(op);
  auto child = [&](std::size_t i) {
    if (op.children.size() <= i) raise(ErrorCode::InvalidConfig, d + " is missing an input");
    return build_operator(*op.children[i], ctx, scratch);
  };
  switch (op.kind) {
    case OpKind::Unit: return std::make_unique<UnitOp>(d);
    case OpKind::AllNodeScan:
    case OpKind::NodeByLabelScan: return std::make_unique<ScanOp>(d, op.var, op.labels, ctx);
    case OpKind::StructuredFilter: {
      const LogicalOp& in = *op.children.at(0);
      if (can_seek(op, in, *ctx.graph)) {
        return std::make_unique<IndexSeekOp>("IndexSeek(" + in.var + ", " + query::print_expr(*op.pred) + ")",
                                             in.var, in.labels, op.pred, ctx);
      }
      return std::make_unique<FilterOp>(d, child(0), op.pred, ctx, scratch);
    }
    case OpKind::UnstructuredFilter:
      return std::make_unique<UnstructuredFilterOp>(d, child(0), op.pred, op.filter_id, ctx, scratch);
    case OpKind::Expand: return std::make_unique<ExpandOp>(d, child(0), op.expand, op.labels, ctx);
    case OpKind::Join: return std::make_unique<JoinOp>(d, child(0), child(1), op.join_vars, ctx);
    case OpKind::ShortestPathOp: {
      auto in = child(0);
      auto schema = in->schema();
      schema.push_back(op.var);
      return std::make_unique<ComputeOp>(d, std::move(schema), std::move(in),
                                         std::vector<query::ExprPtr>{query::make_expr(op.path)}, true, ctx, scratch,
                                         NamedPaths{});
    }
    case OpKind::Projection: {
      std::vector<query::ExprPtr> exprs;
      for (const auto& item : op.items) exprs.push_back(item.expr);
      return std::make_unique<ComputeOp>(d, op.columns, child(0), std::move(exprs), false, ctx, scratch,
                                         op.named_paths);
    }
  }
  raise(ErrorCode::InvalidConfig, "unknown operator");
}

ResultSet execute(const LogicalOp& plan, ExecContext& ctx) {
  auto root = build_operator(plan, ctx, std::make_shared<QueryScratch>());
  ResultSet rs;
  rs.columns = root->schema();
  const Clock& clock = ctx.time();
  double start = clock.now_secs();
  std::vector<Row> batch;
  std::size_t size = std::max<std::size_t>(1, ctx.options.batch_size);
  while (true) {
    std::size_t want = size;
    if (ctx.options.limit) {
      if (rs.rows.size() >= *ctx.options.limit) break;
      want = std::min<std::size_t>(want, *ctx.options.limit - rs.rows.size());
    }
    if (!root->next(batch, want)) break;
    for (auto& r : batch) rs.rows.push_back(std::move(r));
    if (ctx.options.timeout_secs && clock.now_secs() - start > *ctx.options.timeout_secs)
      raise(ErrorCode::Timeout, "query exceeded " + std::to_string(*ctx.options.timeout_secs) + " s");
  }
  return rs;
}

namespace {

std::optional<Value> storable(const Datum& d, ExecContext& ctx) {
  if (is_null(d)) return std::nullopt;
  if (const auto* v = std::get_if<Value>(&d)) return *v;
  if (const auto* t = std::get_if<TransientBlobPtr>(&d)) {
    if (!ctx.blobs) raise(ErrorCode::InvalidConfig, "execution context has no blob store");
    return Value{BlobRef{ctx.blobs->put_blob((*t)->bytes, (*t)->mime)}};
  }
  if (const auto* s = std::get_if<SemanticValue>(&d)) {
    switch (semantic_kind(*s)) {
      case SemanticKind::Number: return Value{std::get<double>(*s)};
      case SemanticKind::Text: return Value{std::get<std::string>(*s)};
      case SemanticKind::Categorical: return Value{std::get<Categorical>(*s).value};
      case SemanticKind::Vector: break;
    }
  }
  raise(ErrorCode::EvaluationError, "value cannot be stored as a property");
}

Properties eval_props(const std::vector<std::pair<std::string, query::ExprPtr>>& props, Evaluator& ev,
                      const Row& row, ExecContext& ctx) {
  Properties out;
  for (const auto& [k, e] : props) {
    if (auto v = storable(ev.eval(*e, row), ctx)) out[k] = *v;
  }
  return out;
}

}  // namespace

ResultSet execute_statement(const query::Ast& ast, const LogicalOp& plan, ExecContext& ctx) {
  if (!ast.is_write()) return execute(plan, ctx);
  if (!ctx.graph) raise(ErrorCode::InvalidConfig, "execution context has no graph");
  GraphStore& g = *ctx.graph;

  const LogicalOp& input = plan.kind == OpKind::Projection ? *plan.children.at(0) : plan;
  auto scratch = std::make_shared<QueryScratch>();
  std::vector<Row> rows;
  std::vector<std::string> schema;
  {
    auto op = build_operator(input, ctx, scratch);
    schema = op->schema();
    std::vector<Row> batch;
    while (op->next(batch, ctx.options.batch_size))
      for (auto& r : batch) rows.push_back(std::move(r));
  }
  // Mutations follow a plan-independent row order so that replicas replaying
  // the statement under different plans assign the same ids.
  {
    std::vector<std::size_t> cols(schema.size());
    for (std::size_t i = 0; i < cols.size(); ++i) cols[i] = i;
    std::sort(cols.begin(), cols.end(), [&](std::size_t a, std::size_t b) { return schema[a] < schema[b]; });
    std::vector<std::pair<std::vector<std::string>, std::size_t>> keyed;
    keyed.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      std::vector<std::string> k;
      for (auto c : cols) k.push_back(datum_key(rows[i][c]));
      keyed.emplace_back(std::move(k), i);
    }
    std::sort(keyed.begin(), keyed.end());
    std::vector<Row> ordered;
    ordered.reserve(rows.size());
    for (auto& [k, i] : keyed) ordered.push_back(std::move(rows[i]));
    rows = std::move(ordered);
  }

  auto bind = [&](const std::optional<std::string>& var) {
    if (var && std::find(schema.begin(), schema.end(), *var) == schema.end()) schema.push_back(*var);
  };
  for (const auto& p : ast.create) {
    for (const auto& n : p.nodes) bind(n.var);
    for (const auto& r : p.rels) bind(r.var);
  }
  NamedPaths paths = plan.kind == OpKind::Projection ? plan.named_paths : NamedPaths{};
  Evaluator ev(ctx, schema, scratch, paths);

  std::set<RelId> dead_rels;
  std::set<NodeId> dead_nodes;
  for (auto& row : rows) {
    row.resize(schema.size());
    for (const auto& p : ast.create) {
      std::vector<NodeId> ids;
      for (const auto& n : p.nodes) {
        std::optional<std::size_t> s = n.var ? ev.slot(*n.var) : std::nullopt;
        if (s && !is_null(row[*s])) {
          const auto* id = std::get_if<NodeId>(&row[*s]);
          if (!id) raise(ErrorCode::EvaluationError, *n.var + " is not a node");
          if (!n.labels.empty() || !n.props.empty())
            raise(ErrorCode::EvaluationError, "cannot redeclare bound node " + *n.var);
          ids.push_back(*id);
          continue;
        }
        NodeId id = g.create_node(n.labels, eval_props(n.props, ev, row, ctx));
        if (s) row[*s] = id;
        ids.push_back(id);
      }
      for (std::size_t i = 0; i < p.rels.size(); ++i) {
        const auto& r = p.rels[i];
        if (!r.type) raise(ErrorCode::EvaluationError, "CREATE needs a relationship type");
        NodeId a = ids[i], b = ids[i + 1];
        if (r.direction == Direction::In) std::swap(a, b);
        RelId id = g.create_rel(a, b, *r.type, eval_props(r.props, ev, row, ctx));
        if (r.var) row[*ev.slot(*r.var)] = id;
      }
    }
    for (const auto& item : ast.set) {
      auto s = ev.slot(item.var);
      if (!s) raise(ErrorCode::UnboundVariable, "variable " + item.var + " is not bound");
      const Datum& target = row[*s];
      if (is_null(target)) continue;
      if (item.label) {
        const auto* n = std::get_if<NodeId>(&target);
        if (!n) raise(ErrorCode::EvaluationError, "labels can only be set on nodes");
        g.add_label(*n, *item.label);
        continue;
      }
      auto v = storable(ev.eval(*item.value, row), ctx);
      if (const auto* n = std::get_if<NodeId>(&target)) {
        if (v) {
          g.set_property(*n, *item.key, *v);
        } else {
          g.remove_property(*n, *item.key);
        }
      } else if (const auto* r = std::get_if<RelId>(&target)) {
        if (v) g.set_property(*r, *item.key, *v);
      } else {
        raise(ErrorCode::EvaluationError, item.var + " is not a node or relationship");
      }
    }
    for (const auto& var : ast.del) {
      auto s = ev.slot(var);
      if (!s) raise(ErrorCode::UnboundVariable, "variable " + var + " is not bound");
      if (const auto* n = std::get_if<NodeId>(&row[*s])) dead_nodes.insert(*n);
      if (const auto* r = std::get_if<RelId>(&row[*s])) dead_rels.insert(*r);
    }
  }
  for (RelId r : dead_rels)
    if (g.has_rel(r)) g.delete_rel(r);
  for (NodeId n : dead_nodes) {
    if (!g.has_node(n)) continue;
    if (!ast.detach && g.degree(n, Direction::Both) > 0)
      raise(ErrorCode::EvaluationError,
            "node " + std::to_string(n.value) + " still has relationships; use DETACH DELETE");
  }
  for (NodeId n : dead_nodes)
    if (g.has_node(n)) g.delete_node(n);

  ResultSet rs;
  if (ast.ret.empty()) return rs;
  for (const auto& item : ast.ret) rs.columns.push_back(query::column_name(item));
  for (const auto& row : rows) {
    Row out;
    for (const auto& item : ast.ret) out.push_back(ev.eval(*item.expr, row));
    rs.rows.push_back(std::move(out));
  }
  return rs;
}

BlobId create_from_source(const query::LiteralFn& fn, ExecContext& ctx) {
  if (!ctx.blobs) raise(ErrorCode::InvalidConfig, "execution context has no blob store");
  Evaluator ev(ctx, {});
  Datum arg = ev.eval(*fn.arg, Row{});
  const auto* v = std::get_if<Value>(&arg);
  const auto* s = v ? std::get_if<std::string>(v) : nullptr;
  if (!s) raise(ErrorCode::EvaluationError, std::string("Blob.") + query::literal_fn_name(fn.fn) + " expects a string");
  auto blob = fetch_source(fn.fn, *s, ctx);
  return ctx.blobs->put_blob(blob->bytes, blob->mime);
}

std::vector<NodeId> pushdown_filter(const query::Expr& pred, const std::string& var,
                                    const std::vector<std::string>& labels, ExecContext& ctx) {
  const GraphStore& g = *ctx.graph;
  Evaluator ev(ctx, {var});
  auto syms = label_symbols(g, labels);
  auto keep = [&](NodeId n) { return has_labels(g, n, syms) && ev.truth(pred, Row{n}) == true; };

  const PropertyIndex* index = nullptr;
  auto form = plan::pushdown_form(pred, var);
  if (form) {
    for (const auto& l : labels) {
      if ((index = g.index(l, form->key))) break;
    }
  }
  std::vector<NodeId> out;
  if (index) {
    Datum operand = ev.eval(*form->operand, Row{});
    const auto* v = std::get_if<Value>(&operand);
    if (!v) return out;
    std::vector<NodeId> cand;
    switch (form->op) {
      case query::CmpOp::Eq: cand = index->equal(*v); break;
      case query::CmpOp::Lt: cand = index->range(std::nullopt, false, *v, false); break;
      case query::CmpOp::Le: cand = index->range(std::nullopt, false, *v, true); break;
      case query::CmpOp::Gt: cand = index->range(*v, false, std::nullopt, false); break;
      case query::CmpOp::Ge: cand = index->range(*v, true, std::nullopt, false); break;
      default: raise(ErrorCode::InvalidConfig, "operator cannot be pushed down");
    }
    // The index orders across value domains; the predicate itself does not.
    for (NodeId n : cand)
      if (keep(n)) out.push_back(n);
  } else {
    auto ids = labels.empty() ? g.scan() : g.scan(labels.front());
    for (NodeId n : ids)
      if (keep(n)) out.push_back(n);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace blobgraph
