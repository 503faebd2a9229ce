#include "blobgraph/planner/logical_plan.hpp"

#include <cstdio>

namespace blobgraph::plan {

const char* op_kind_name(OpKind k) noexcept {
  switch (k) {
    case OpKind::Unit: return "Unit";
    case OpKind::AllNodeScan: return "AllNodeScan";
    case OpKind::NodeByLabelScan: return "NodeByLabelScan";
    case OpKind::StructuredFilter: return "Filter";
    case OpKind::UnstructuredFilter: return "UnstructuredFilter";
    case OpKind::Expand: return "Expand";
    case OpKind::Join: return "Join";
    case OpKind::ShortestPathOp: return "ShortestPath";
    case OpKind::Projection: return "Projection";
  }
  return "?";
}

namespace {

std::string join_names(const std::vector<std::string>& v, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += v[i];
  }
  return out;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

void explain_into(const LogicalOp& op, int depth, std::string& out) {
  out.append(static_cast<std::size_t>(depth) * 2, ' ');
  out += describe(op);
  out += "  est_cost=" + fmt(op.est_cost) + " est_card=" + fmt(op.est_card) + "\n";
  for (const auto& c : op.children) explain_into(*c, depth + 1, out);
}

}  // namespace

std::string describe(const LogicalOp& op) {
  std::string s = op_kind_name(op.kind);
  switch (op.kind) {
    case OpKind::Unit: return s;
    case OpKind::AllNodeScan: return s + "(" + op.var + ")";
    case OpKind::NodeByLabelScan: {
      std::string l;
      for (const auto& x : op.labels) l += ":" + x;
      return s + "(" + op.var + l + ")";
    }
    case OpKind::StructuredFilter:
      return s + (op.indexed ? "[indexed](" : "(") + query::print_expr(*op.pred) + ")";
    case OpKind::UnstructuredFilter:
      return s + "[" + op.filter_id + "](" + query::print_expr(*op.pred) + ")";
    case OpKind::Expand: {
      const auto& e = op.expand;
      std::string rel = e.rel + (e.type ? ":" + *e.type : "");
      std::string arrow = e.dir == Direction::Out  ? "-[" + rel + "]->"
                          : e.dir == Direction::In ? "<-[" + rel + "]-"
                                                   : "-[" + rel + "]-";
      std::string to = e.to;
      for (const auto& l : op.labels) to += ":" + l;
      return (e.into ? std::string("ExpandInto") : s) + "((" + e.from + ")" + arrow + "(" + to + "))";
    }
    case OpKind::Join:
      return op.join_vars.empty() ? std::string("CartesianProduct") : s + "(" + join_names(op.join_vars, ", ") + ")";
    case OpKind::ShortestPathOp: {
      const auto& p = op.path;
      std::string rel = p.rel_type ? ":" + *p.rel_type : "";
      return s + "(" + op.var + " = (" + p.a + ")-[" + rel + "*" + std::to_string(p.min_hops) + ".." +
             std::to_string(p.max_hops) + "]-(" + p.b + "))";
    }
    case OpKind::Projection: return s + "(" + join_names(op.columns, ", ") + ")";
  }
  return s;
}

std::string explain(const LogicalOp& op) {
  std::string out;
  explain_into(op, 0, out);
  return out;
}

std::size_t plan_size(const LogicalOp& op) {
  std::size_t n = 1;
  for (const auto& c : op.children) n += plan_size(*c);
  return n;
}

std::size_t count_ops(const LogicalOp& op, OpKind kind) {
  std::size_t n = op.kind == kind ? 1 : 0;
  for (const auto& c : op.children) n += count_ops(*c, kind);
  return n;
}

namespace {
void postorder_into(const LogicalOp& op, std::vector<const LogicalOp*>& out) {
  for (const auto& c : op.children) postorder_into(*c, out);
  out.push_back(&op);
}
}  // namespace

std::vector<const LogicalOp*> postorder(const LogicalOp& op) {
  std::vector<const LogicalOp*> out;
  postorder_into(op, out);
  return out;
}

}  // namespace blobgraph::plan
