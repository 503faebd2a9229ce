#include "blobgraph/query/query_graph.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "blobgraph/common/error.hpp"

namespace blobgraph::query {

std::optional<std::size_t> QueryGraph::node_index(const std::string& var) const {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].var == var) return i;
  return std::nullopt;
}

std::size_t QueryGraph::component_count() const {
  std::set<std::size_t> distinct(component.begin(), component.end());
  return distinct.size();
}

std::vector<const Predicate*> QueryGraph::attached(PredRole role) const {
  std::vector<const Predicate*> out;
  for (const auto& p : predicates)
    if (p.role == role && p.qnode) out.push_back(&p);
  return out;
}

std::vector<const Predicate*> QueryGraph::detached(PredRole role) const {
  std::vector<const Predicate*> out;
  for (const auto& p : predicates)
    if (p.role == role && !p.qnode) out.push_back(&p);
  return out;
}

std::vector<ExprPtr> conjuncts(const ExprPtr& e) {
  std::vector<ExprPtr> out;
  if (!e) return out;
  if (auto* b = std::get_if<BoolExpr>(&e->node); b && b->op == BoolOp::And) {
    auto l = conjuncts(b->lhs);
    auto r = conjuncts(b->rhs);
    out.insert(out.end(), l.begin(), l.end());
    out.insert(out.end(), r.begin(), r.end());
  } else {
    out.push_back(e);
  }
  return out;
}

namespace {

void collect_keys(const Expr& e, std::vector<std::string>& subs, std::vector<std::string>& props,
                  std::vector<std::string>& ops) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, SubProp>) {
          subs.push_back(x.sub_key);
          collect_keys(*x.base, subs, props, ops);
        } else if constexpr (std::is_same_v<T, PropAccess>) {
          props.push_back(x.key);
        } else if constexpr (std::is_same_v<T, Compare>) {
          ops.push_back(cmp_op_text(x.op));
          collect_keys(*x.lhs, subs, props, ops);
          collect_keys(*x.rhs, subs, props, ops);
        } else if constexpr (std::is_same_v<T, BoolExpr>) {
          collect_keys(*x.lhs, subs, props, ops);
          collect_keys(*x.rhs, subs, props, ops);
        } else if constexpr (std::is_same_v<T, NotExpr>) {
          collect_keys(*x.operand, subs, props, ops);
        }
      },
      e.node);
}

std::string clean(std::string s) {
  for (auto& c : s)
    if (std::isspace(static_cast<unsigned char>(c))) c = '_';
  return s;
}

}  // namespace

std::string filter_id_for(const Expr& e) {
  std::vector<std::string> subs, props, ops;
  collect_keys(e, subs, props, ops);
  std::string key = !subs.empty() ? subs.front() : !props.empty() ? props.front() : "expr";
  std::string op = ops.empty() ? "?" : ops.front();
  return clean(key + "|" + op);
}

QueryGraph to_query_graph(const Ast& ast) {
  QueryGraph qg;
  std::set<std::string> rel_vars, path_vars, create_vars;
  std::size_t anon_nodes = 0, anon_edges = 0;

  auto qnode_for = [&](const NodePat& n) -> std::size_t {
    std::string var = n.var ? *n.var : "_n" + std::to_string(anon_nodes++);
    if (rel_vars.count(var) || path_vars.count(var)) {
      raise(ErrorCode::ParseError, "variable '" + var + "' is already bound to a relationship or path");
    }
    std::size_t idx;
    if (auto found = qg.node_index(var)) {
      idx = *found;
    } else {
      idx = qg.nodes.size();
      qg.nodes.push_back(QNode{var, {}});
    }
    for (const auto& l : n.labels) {
      auto& labels = qg.nodes[idx].labels;
      if (std::find(labels.begin(), labels.end(), l) == labels.end()) labels.push_back(l);
    }
    for (const auto& [key, value] : n.props) {
      auto e = make_expr(Compare{CmpOp::Eq, make_expr(PropAccess{var, key}), value});
      qg.predicates.push_back(Predicate{e, {}, false, PredRole::Filter, std::nullopt, {}});
    }
    return idx;
  };

  std::vector<ExprPtr> filters;
  for (const auto& pat : ast.match) {
    std::vector<std::string> path;
    std::size_t prev = qnode_for(pat.nodes[0]);
    path.push_back(qg.nodes[prev].var);
    for (std::size_t i = 0; i < pat.rels.size(); ++i) {
      const RelPat& r = pat.rels[i];
      std::size_t next = qnode_for(pat.nodes[i + 1]);
      std::string var = r.var ? *r.var : "_e" + std::to_string(anon_edges++);
      if (r.var && (qg.node_index(var) || path_vars.count(var))) {
        raise(ErrorCode::ParseError, "variable '" + var + "' is already bound to a node or path");
      }
      if (!rel_vars.insert(var).second) {
        raise(ErrorCode::ParseError, "relationship variable '" + var + "' used twice");
      }
      QEdge e{var, prev, next, r.type, Direction::Out};
      if (r.direction == Direction::In) std::swap(e.src, e.tgt);
      if (r.direction == Direction::Both) e.direction = Direction::Both;
      qg.edges.push_back(e);
      for (const auto& [key, value] : r.props) {
        filters.push_back(make_expr(Compare{CmpOp::Eq, make_expr(PropAccess{var, key}), value}));
      }
      path.push_back(var);
      path.push_back(qg.nodes[next].var);
      prev = next;
    }
    if (pat.path_var) {
      const std::string& p = *pat.path_var;
      if (qg.node_index(p) || rel_vars.count(p) || !path_vars.insert(p).second) {
        raise(ErrorCode::ParseError, "path variable '" + p + "' is already bound");
      }
      qg.paths[p] = std::move(path);
    }
  }

  for (const auto& pat : ast.create) {
    for (const auto& n : pat.nodes)
      if (n.var && !qg.node_index(*n.var)) create_vars.insert(*n.var);
    for (const auto& r : pat.rels)
      if (r.var) create_vars.insert(*r.var);
  }

  auto bound = [&](const std::string& v) {
    return qg.node_index(v) || rel_vars.count(v) || path_vars.count(v) || create_vars.count(v);
  };
  auto check = [&](const Expr& e) {
    for (const auto& v : expr_vars(e))
      if (!bound(v)) raise(ErrorCode::UnboundVariable, "variable '" + v + "' is not bound");
  };
  for (const auto& pat : ast.create) {
    for (const auto& n : pat.nodes)
      for (const auto& [k, v] : n.props) check(*v);
    for (const auto& r : pat.rels)
      for (const auto& [k, v] : r.props) check(*v);
  }

  for (auto& e : conjuncts(ast.where)) filters.push_back(e);
  for (const auto& e : filters) {
    check(*e);
    qg.predicates.push_back(Predicate{e, {}, false, PredRole::Filter, std::nullopt, {}});
  }
  for (const auto& item : ast.ret) {
    check(*item.expr);
    if (auto* sp = std::get_if<ShortestPath>(&item.expr->node)) {
      for (const auto* v : {&sp->a, &sp->b}) {
        if (!qg.node_index(*v)) raise(ErrorCode::UnboundVariable, "shortestPath endpoint '" + *v + "' is not a matched node");
      }
    }
    qg.projection.push_back(item);
    if (std::holds_alternative<Compare>(item.expr->node) && is_unstructured(*item.expr)) {
      qg.predicates.push_back(Predicate{item.expr, {}, true, PredRole::Projection, std::nullopt, {}});
    }
  }
  for (const auto& s : ast.set) {
    if (!bound(s.var)) raise(ErrorCode::UnboundVariable, "variable '" + s.var + "' is not bound");
    if (s.value) check(*s.value);
  }
  for (const auto& v : ast.del)
    if (!bound(v)) raise(ErrorCode::UnboundVariable, "variable '" + v + "' is not bound");

  for (auto& p : qg.predicates) {
    p.vars = expr_vars(*p.expr);
    p.unstructured = is_unstructured(*p.expr);
    if (p.vars.size() == 1) p.qnode = qg.node_index(p.vars[0]);
    if (p.unstructured) p.filter_id = filter_id_for(*p.expr);
  }

  // Connected components over q-edges.
  std::vector<std::size_t> parent(qg.nodes.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& e : qg.edges) parent[find(e.src)] = find(e.tgt);
  qg.component.resize(qg.nodes.size());
  for (std::size_t i = 0; i < qg.nodes.size(); ++i) qg.component[i] = find(i);
  return qg;
}

}  // namespace blobgraph::query
