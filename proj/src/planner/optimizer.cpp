#include "blobgraph/planner/optimizer.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <map>

#include "blobgraph/common/error.hpp"

namespace blobgraph::plan {

using query::ExprPtr;
using query::QueryGraph;

namespace {

constexpr std::uint64_t bit(std::size_t i) { return std::uint64_t{1} << i; }

bool contains(const std::vector<std::string>& v, const std::string& x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

bool subset(std::uint64_t a, std::uint64_t b) { return (a & ~b) == 0; }

PlanPtr finish(LogicalOp op) {
  op.est_cost = op.op_cost;
  op.fingerprint = describe(op);
  if (!op.children.empty()) {
    op.fingerprint += "{";
    for (std::size_t i = 0; i < op.children.size(); ++i) {
      op.est_cost += op.children[i]->est_cost;
      if (i) op.fingerprint += ",";
      op.fingerprint += op.children[i]->fingerprint;
    }
    op.fingerprint += "}";
  }
  return std::make_shared<const LogicalOp>(std::move(op));
}

bool better(const PlanPtr& a, const PlanPtr& b) {
  if (a->est_cost != b->est_cost) return a->est_cost < b->est_cost;
  return a->fingerprint < b->fingerprint;
}

query::CmpOp mirror(query::CmpOp op) {
  using query::CmpOp;
  switch (op) {
    case CmpOp::Lt: return CmpOp::Gt;
    case CmpOp::Le: return CmpOp::Ge;
    case CmpOp::Gt: return CmpOp::Lt;
    case CmpOp::Ge: return CmpOp::Le;
    default: return op;
  }
}

bool constant_operand(const query::Expr& e) {
  return std::holds_alternative<query::Literal>(e.node) || std::holds_alternative<query::Param>(e.node);
}

}  // namespace

std::set<std::size_t> PlanEntry::covered() const {
  std::set<std::size_t> out;
  for (std::size_t i = 0; i < 64; ++i)
    if (nodes & bit(i)) out.insert(i);
  return out;
}

std::optional<PushdownForm> pushdown_form(const query::Expr& pred, const std::string& var) {
  using query::CmpOp;
  const auto* cmp = std::get_if<query::Compare>(&pred.node);
  if (!cmp) return std::nullopt;
  if (cmp->op != CmpOp::Eq && cmp->op != CmpOp::Lt && cmp->op != CmpOp::Le && cmp->op != CmpOp::Gt &&
      cmp->op != CmpOp::Ge) {
    return std::nullopt;
  }
  auto prop_of = [&](const query::Expr& e) -> const query::PropAccess* {
    const auto* p = std::get_if<query::PropAccess>(&e.node);
    return p && p->var == var ? p : nullptr;
  };
  if (const auto* p = prop_of(*cmp->lhs); p && constant_operand(*cmp->rhs)) {
    return PushdownForm{p->key, cmp->op, cmp->rhs};
  }
  if (const auto* p = prop_of(*cmp->rhs); p && constant_operand(*cmp->lhs)) {
    return PushdownForm{p->key, mirror(cmp->op), cmp->lhs};
  }
  return std::nullopt;
}

Planner::Planner(const QueryGraph& qg, PlanningContext ctx) : qg_(qg), ctx_(std::move(ctx)) {
  if (qg_.nodes.size() > 64 || qg_.edges.size() > 64 || qg_.predicates.size() > 64) {
    raise(ErrorCode::Unsatisfiable, "query graph too large to plan (more than 64 nodes, edges or predicates)");
  }
  for (std::size_t j = 0; j < qg_.predicates.size(); ++j)
    if (qg_.predicates[j].role == query::PredRole::Filter) filter_mask_ |= bit(j);
}

double Planner::speed(const std::string& filter_id) const {
  auto it = ctx_.speeds.find(filter_id);
  FilterSpeedStats s = it == ctx_.speeds.end() ? FilterSpeedStats{filter_id} : it->second;
  return expected_cost(s, 1.0, ctx_.cost.default_v);
}

// ---- operator factories ----

PlanPtr Planner::unit() const {
  LogicalOp op;
  op.kind = OpKind::Unit;
  op.est_card = 1.0;
  return finish(std::move(op));
}

PlanPtr Planner::scan(std::size_t qnode) const {
  const auto& n = qg_.nodes.at(qnode);
  LogicalOp op;
  op.var = n.var;
  op.labels = n.labels;
  op.schema = {n.var};
  if (n.labels.empty()) {
    op.kind = OpKind::AllNodeScan;
    op.est_card = static_cast<double>(ctx_.stats.node_count);
  } else {
    op.kind = OpKind::NodeByLabelScan;
    double card = static_cast<double>(ctx_.stats.label_count(n.labels[0]));
    for (const auto& l : n.labels) card = std::min(card, static_cast<double>(ctx_.stats.label_count(l)));
    op.est_card = card;
  }
  op.op_cost = op.est_card * ctx_.cost.scan_row;
  return finish(std::move(op));
}

PlanPtr Planner::filter(PlanPtr child, const ExprPtr& pred) const {
  LogicalOp op;
  op.pred = pred;
  op.schema = child->schema;
  double in = child->est_card;
  if (query::is_unstructured(*pred)) {
    op.kind = OpKind::UnstructuredFilter;
    op.filter_id = query::filter_id_for(*pred);
    op.est_card = in * ctx_.card.unstructured_selectivity;
    op.op_cost = in * speed(op.filter_id);
  } else {
    op.kind = OpKind::StructuredFilter;
    bool scan_child = child->kind == OpKind::NodeByLabelScan;
    if (scan_child) {
      if (auto form = pushdown_form(*pred, child->var)) {
        for (const auto& l : child->labels)
          if (ctx_.indexes.count({l, form->key})) op.indexed = true;
      }
    }
    op.est_card = in * ctx_.card.structured_selectivity;
    op.op_cost = in * (op.indexed ? ctx_.cost.structured_indexed_row : ctx_.cost.structured_row);
  }
  op.children = {std::move(child)};
  return finish(std::move(op));
}

PlanPtr Planner::expand(PlanPtr child, std::size_t edge, std::size_t from) const {
  const auto& qe = qg_.edges.at(edge);
  std::size_t to = from == qe.src ? qe.tgt : qe.src;
  LogicalOp op;
  op.kind = OpKind::Expand;
  op.expand.from = qg_.nodes[from].var;
  op.expand.to = qg_.nodes[to].var;
  op.expand.rel = qe.var;
  op.expand.type = qe.type;
  op.expand.dir = qe.direction == Direction::Both ? Direction::Both
                  : from == qe.src                ? Direction::Out
                                                  : Direction::In;
  op.expand.into = contains(child->schema, op.expand.to);
  double nodes = std::max<double>(1.0, static_cast<double>(ctx_.stats.node_count));
  double fanout = ctx_.stats.avg_out_degree * (op.expand.dir == Direction::Both ? 2.0 : 1.0);
  double in = child->est_card;
  op.schema = child->schema;
  op.schema.push_back(qe.var);
  if (op.expand.into) {
    op.est_card = in * fanout / nodes;
  } else {
    op.labels = qg_.nodes[to].labels;
    double frac = 1.0;
    for (const auto& l : op.labels)
      frac = std::min(frac, static_cast<double>(ctx_.stats.label_count(l)) / nodes);
    op.est_card = in * fanout * frac;
    op.schema.push_back(op.expand.to);
  }
  op.op_cost = in * ctx_.cost.expand_in_row + op.est_card * ctx_.cost.expand_out_row;
  op.children = {std::move(child)};
  return finish(std::move(op));
}

PlanPtr Planner::join(PlanPtr a, PlanPtr b) const {
  LogicalOp op;
  op.kind = OpKind::Join;
  op.schema = a->schema;
  for (const auto& v : b->schema) {
    if (contains(a->schema, v)) {
      op.join_vars.push_back(v);
    } else {
      op.schema.push_back(v);
    }
  }
  double product = a->est_card * b->est_card;
  op.est_card = op.join_vars.empty() ? product : product * ctx_.card.join_correction;
  op.op_cost = (a->est_card + b->est_card + op.est_card) * ctx_.cost.join_row;
  op.children = {std::move(a), std::move(b)};
  return finish(std::move(op));
}

// ---- greedy search ----

PlanTable Planner::leaf_plans() const {
  PlanTable t;
  if (qg_.nodes.empty()) {
    t.push_back(PlanEntry{unit(), 0, 0, 0});
    return t;
  }
  for (std::size_t i = 0; i < qg_.nodes.size(); ++i) t.push_back(PlanEntry{scan(i), bit(i), 0, 0});
  return t;
}

std::vector<PlanEntry> Planner::greedy_ordering(const PlanTable& table) const {
  std::vector<PlanEntry> cands;
  auto components = [&](std::uint64_t nodes) {
    std::set<std::size_t> c;
    for (std::size_t i = 0; i < qg_.nodes.size(); ++i)
      if (nodes & bit(i)) c.insert(qg_.component[i]);
    return c;
  };

  for (std::size_t i = 0; i < table.size(); ++i) {
    for (std::size_t j = i + 1; j < table.size(); ++j) {
      const auto& a = table[i];
      const auto& b = table[j];
      bool shared = false;
      for (const auto& v : b.plan->schema) shared = shared || contains(a.plan->schema, v);
      if (!shared) {
        // Cartesian products only between disconnected parts of the query.
        auto ca = components(a.nodes);
        auto cb = components(b.nodes);
        bool overlap = std::any_of(ca.begin(), ca.end(), [&](std::size_t c) { return cb.count(c) > 0; });
        if (overlap) continue;
      }
      cands.push_back(PlanEntry{join(a.plan, b.plan), a.nodes | b.nodes, a.edges | b.edges, a.preds | b.preds});
    }
  }

  std::vector<std::size_t> owner(qg_.nodes.size(), table.size());
  for (std::size_t i = 0; i < table.size(); ++i)
    for (std::size_t n = 0; n < qg_.nodes.size(); ++n)
      if (table[i].nodes & bit(n)) owner[n] = i;

  for (const auto& e : table) {
    for (std::size_t k = 0; k < qg_.edges.size(); ++k) {
      if (e.edges & bit(k)) continue;
      const auto& qe = qg_.edges[k];
      std::size_t from;
      if (e.nodes & bit(qe.src)) {
        from = qe.src;
      } else if (e.nodes & bit(qe.tgt)) {
        from = qe.tgt;
      } else {
        continue;
      }
      std::size_t to = from == qe.src ? qe.tgt : qe.src;
      PlanPtr ex = expand(e.plan, k, from);
      if (e.nodes & bit(to)) {
        cands.push_back(PlanEntry{ex, e.nodes, e.edges | bit(k), e.preds});
        continue;
      }
      // The target belongs to another entry: either bind it afresh, dropping
      // that entry when it holds nothing else, or join with it.
      const PlanEntry& other = table[owner[to]];
      bool bare_scan = other.nodes == bit(to) && other.edges == 0 && other.preds == 0;
      if (other.nodes == bit(to)) cands.push_back(PlanEntry{ex, e.nodes | bit(to), e.edges | bit(k), e.preds});
      if (!bare_scan) {
        cands.push_back(PlanEntry{join(ex, other.plan), e.nodes | other.nodes, e.edges | other.edges | bit(k),
                                  e.preds | other.preds});
      }
    }
  }

  for (const auto& e : table) {
    for (std::size_t j = 0; j < qg_.predicates.size(); ++j) {
      if (!(filter_mask_ & bit(j)) || (e.preds & bit(j))) continue;
      const auto& p = qg_.predicates[j];
      bool bound = std::all_of(p.vars.begin(), p.vars.end(), [&](const std::string& v) {
        return contains(e.plan->schema, v);
      });
      if (!bound) continue;
      cands.push_back(PlanEntry{filter(e.plan, p.expr), e.nodes, e.edges, e.preds | bit(j)});
    }
  }
  // Candidates are costed with the structured predicates they make
  // applicable, so a step that drops an applied filter pays for it again.
  for (auto& c : cands) c = apply_selections(std::move(c));
  return cands;
}

const PlanEntry& Planner::pick_best(const std::vector<PlanEntry>& candidates) {
  if (candidates.empty()) raise(ErrorCode::Unsatisfiable, "no candidate plans");
  const PlanEntry* best = &candidates[0];
  for (const auto& c : candidates) {
    double cc = c.est_cost(), bc = best->est_cost();
    if (cc != bc) {
      if (cc < bc) best = &c;
      continue;
    }
    int pc = std::popcount(c.nodes), pb = std::popcount(best->nodes);
    if (pc != pb) {
      if (pc < pb) best = &c;
      continue;
    }
    if (c.plan->fingerprint < best->plan->fingerprint) best = &c;
  }
  return *best;
}

PlanEntry Planner::apply_selections(PlanEntry e) const {
  for (std::size_t j = 0; j < qg_.predicates.size(); ++j) {
    if (!(filter_mask_ & bit(j)) || (e.preds & bit(j))) continue;
    const auto& p = qg_.predicates[j];
    if (p.unstructured) continue;
    bool bound = std::all_of(p.vars.begin(), p.vars.end(), [&](const std::string& v) {
      return contains(e.plan->schema, v);
    });
    if (!bound) continue;
    e.plan = filter(e.plan, p.expr);
    e.preds |= bit(j);
  }
  return e;
}

PlanTable Planner::advance(const PlanTable& table, const PlanEntry& best, std::vector<std::string>* removed) const {
  PlanTable next;
  for (const auto& e : table) {
    if (subset(e.nodes, best.nodes)) {
      if (removed) removed->push_back(e.plan->fingerprint);
    } else {
      next.push_back(e);
    }
  }
  next.push_back(apply_selections(best));
  return next;
}

bool Planner::complete(const PlanEntry& e) const {
  std::uint64_t all_nodes = qg_.nodes.size() == 64 ? ~std::uint64_t{0} : bit(qg_.nodes.size()) - 1;
  std::uint64_t all_edges = qg_.edges.size() == 64 ? ~std::uint64_t{0} : bit(qg_.edges.size()) - 1;
  return e.nodes == all_nodes && e.edges == all_edges;
}

PlanPtr Planner::finalize(const PlanEntry& e) const {
  PlanPtr plan = e.plan;
  for (std::size_t j = 0; j < qg_.predicates.size(); ++j) {
    if ((filter_mask_ & bit(j)) && !(e.preds & bit(j))) plan = filter(plan, qg_.predicates[j].expr);
  }

  LogicalOp proj;
  proj.kind = OpKind::Projection;
  proj.named_paths = qg_.paths;
  std::size_t sp = 0;
  for (const auto& item : qg_.projection) {
    proj.columns.push_back(query::column_name(item));
    const auto* path = std::get_if<query::ShortestPath>(&item.expr->node);
    if (!path) {
      proj.items.push_back(item);
      continue;
    }
    LogicalOp op;
    op.kind = OpKind::ShortestPathOp;
    op.var = "_sp" + std::to_string(sp++);
    op.path = *path;
    op.schema = plan->schema;
    op.schema.push_back(op.var);
    op.est_card = plan->est_card;
    op.op_cost = plan->est_card * ctx_.cost.shortest_path_row;
    op.children = {plan};
    plan = finish(std::move(op));
    proj.items.push_back(query::ReturnItem{query::make_expr(query::VarRef{plan->var}), item.alias});
  }
  proj.schema = plan->schema;
  proj.est_card = plan->est_card;
  proj.op_cost = proj.est_card * ctx_.cost.projection_row;
  for (const auto& item : proj.items) {
    if (query::is_unstructured(*item.expr)) proj.op_cost += proj.est_card * speed(query::filter_id_for(*item.expr));
  }
  proj.children = {plan};
  return finish(std::move(proj));
}

OptimizeResult Planner::optimize() const {
  OptimizeResult r;
  PlanTable table = leaf_plans();
  std::size_t cap = 4 * (qg_.nodes.size() + qg_.edges.size() + qg_.predicates.size()) + 8;
  for (;;) {
    auto cands = greedy_ordering(table);
    if (cands.empty()) break;
    const PlanEntry& best = pick_best(cands);
    TraceStep step;
    for (const auto& c : cands) step.candidates.emplace_back(c.plan->fingerprint, c.est_cost());
    step.chosen = best.plan->fingerprint;
    table = advance(table, best, &step.removed);
    r.trace.push_back(std::move(step));
    if (++r.iterations > cap) raise(ErrorCode::Unsatisfiable, "greedy planning did not converge");
  }
  if (table.size() != 1 || !complete(table[0])) {
    raise(ErrorCode::Unsatisfiable, "plan table did not converge to a single complete plan");
  }
  r.plan = finalize(table[0]);
  return r;
}

PlanPtr Planner::naive() const {
  if (qg_.nodes.empty()) return finalize(PlanEntry{unit(), 0, 0, 0});
  std::uint64_t applied = 0;
  std::vector<PlanPtr> leaves;
  for (std::size_t i = 0; i < qg_.nodes.size(); ++i) {
    PlanPtr p = scan(i);
    for (std::size_t j = 0; j < qg_.predicates.size(); ++j) {
      const auto& pr = qg_.predicates[j];
      if ((filter_mask_ & bit(j)) && pr.qnode == i) {
        p = filter(p, pr.expr);
        applied |= bit(j);
      }
    }
    leaves.push_back(p);
  }

  PlanPtr whole;
  std::uint64_t nodes = 0, edges = 0;
  for (std::size_t start = 0; start < qg_.nodes.size(); ++start) {
    if (nodes & bit(start)) continue;
    PlanPtr comp = leaves[start];
    nodes |= bit(start);
    for (bool grew = true; grew;) {
      grew = false;
      for (std::size_t k = 0; k < qg_.edges.size(); ++k) {
        if (edges & bit(k)) continue;
        const auto& qe = qg_.edges[k];
        bool s = nodes & bit(qe.src), t = nodes & bit(qe.tgt);
        if (!s && !t) continue;
        std::size_t from = s ? qe.src : qe.tgt;
        std::size_t to = from == qe.src ? qe.tgt : qe.src;
        bool into = s && t;
        comp = expand(comp, k, from);
        if (!into) comp = join(comp, leaves[to]);
        nodes |= bit(to);
        edges |= bit(k);
        grew = true;
        break;
      }
    }
    whole = whole ? join(whole, comp) : comp;
  }
  return finalize(PlanEntry{whole, nodes, edges, applied});
}

OptimizeResult Planner::exhaustive(std::size_t max_states) const {
  std::map<std::string, PlanPtr> memo;
  OptimizeResult r;

  auto key_of = [](const PlanTable& t) {
    std::vector<std::string> parts;
    for (const auto& e : t) {
      parts.push_back(e.plan->fingerprint + "#" + std::to_string(e.nodes) + "." + std::to_string(e.edges) + "." +
                      std::to_string(e.preds));
    }
    std::sort(parts.begin(), parts.end());
    std::string key;
    for (const auto& p : parts) key += p + "|";
    return key;
  };

  std::function<PlanPtr(const PlanTable&)> search = [&](const PlanTable& t) -> PlanPtr {
    std::string key = key_of(t);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    if (++r.states > max_states) raise(ErrorCode::Unsatisfiable, "exhaustive search exceeded its state budget");
    PlanPtr best;
    auto cands = greedy_ordering(t);
    if (cands.empty()) {
      if (t.size() == 1 && complete(t[0])) best = finalize(t[0]);
    } else {
      for (const auto& c : cands) {
        PlanPtr p = search(advance(t, c));
        if (p && (!best || better(p, best))) best = p;
      }
    }
    memo.emplace(std::move(key), best);
    return best;
  };

  r.plan = search(leaf_plans());
  if (!r.plan) raise(ErrorCode::Unsatisfiable, "no complete plan in the search space");
  return r;
}

OptimizeResult optimize(const QueryGraph& qg, const PlanningContext& ctx) { return Planner(qg, ctx).optimize(); }

}  // namespace blobgraph::plan
