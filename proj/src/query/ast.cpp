#include "blobgraph/query/ast.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>

#include "blobgraph/query/lexer.hpp"

namespace blobgraph::query {

const char* cmp_op_text(CmpOp op) noexcept {
  switch (op) {
    case CmpOp::Eq: return "=";
    case CmpOp::Neq: return "<>";
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return ">=";
    case CmpOp::Similarity: return "::";
    case CmpOp::Similar: return "~:";
    case CmpOp::NotSimilar: return "!:";
    case CmpOp::ContainedIn: return "<:";
    case CmpOp::Contains: return ">:";
  }
  return "?";
}

bool is_semantic(CmpOp op) noexcept { return op >= CmpOp::Similarity; }

const char* literal_fn_name(LiteralFnKind k) noexcept {
  switch (k) {
    case LiteralFnKind::FromURL: return "fromURL";
    case LiteralFnKind::FromFile: return "fromFile";
    case LiteralFnKind::FromBytes: return "fromBytes";
  }
  return "?";
}

namespace {

bool props_equal(const std::vector<std::pair<std::string, ExprPtr>>& a,
                 const std::vector<std::pair<std::string, ExprPtr>>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].first != b[i].first || !expr_equal(a[i].second, b[i].second)) return false;
  }
  return true;
}

bool pattern_equal(const PathPattern& a, const PathPattern& b) {
  if (a.path_var != b.path_var || a.nodes.size() != b.nodes.size() || a.rels.size() != b.rels.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.nodes.size(); ++i) {
    const auto &x = a.nodes[i], &y = b.nodes[i];
    if (x.var != y.var || x.labels != y.labels || !props_equal(x.props, y.props)) return false;
  }
  for (std::size_t i = 0; i < a.rels.size(); ++i) {
    const auto &x = a.rels[i], &y = b.rels[i];
    if (x.var != y.var || x.type != y.type || x.direction != y.direction || x.min_hops != y.min_hops ||
        x.max_hops != y.max_hops || !props_equal(x.props, y.props)) {
      return false;
    }
  }
  return true;
}

bool literal_equal(const Value& a, const Value& b) {
  if (a.index() != b.index()) return false;
  // Bitwise for floats so -0.0 and NaN do not surprise the fixpoint check.
  if (auto* x = std::get_if<double>(&a)) {
    double y = std::get<double>(b);
    return std::memcmp(x, &y, sizeof y) == 0;
  }
  return a == b;
}

enum Prec { kOr = 1, kAnd = 2, kNot = 3, kCmp = 4, kPostfix = 5 };

int prec_of(const Expr& e) {
  if (auto* b = std::get_if<BoolExpr>(&e.node)) return b->op == BoolOp::Or ? kOr : kAnd;
  if (std::holds_alternative<NotExpr>(e.node)) return kNot;
  if (std::holds_alternative<Compare>(e.node)) return kCmp;
  // A negative numeric literal prints with a leading '-', which only parses
  // as a primary at the start of an operand; that is fine everywhere.
  return kPostfix;
}

bool plain_ident(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return true;
}

std::string upper(const std::string& s) {
  std::string u;
  for (char c : s) u += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return u;
}

// Names in word position (variables, map keys) can collide with keywords;
// names after ":", "." or "->" cannot.
std::string var_text(const std::string& s) {
  if (plain_ident(s) && !is_keyword(upper(s))) return s;
  return "`" + s + "`";
}

std::string name_text(const std::string& s) { return plain_ident(s) ? s : "`" + s + "`"; }

std::string string_literal(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    switch (c) {
      case '\'': out += "\\'"; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out + "'";
}

std::string float_literal(double d) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", d);
  std::string s = buf;
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

std::string literal_text(const Value& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::int64_t>) {
          return std::to_string(x);
        } else if constexpr (std::is_same_v<T, double>) {
          return float_literal(x);
        } else if constexpr (std::is_same_v<T, std::string>) {
          return string_literal(x);
        } else if constexpr (std::is_same_v<T, bool>) {
          return x ? "true" : "false";
        } else {
          return "Blob.fromBytes('')";  // unreachable from parsed text
        }
      },
      v);
}

std::string wrap(const Expr& e, int min_prec) {
  std::string s = print_expr(e);
  return prec_of(e) < min_prec ? "(" + s + ")" : s;
}

std::string props_text(const std::vector<std::pair<std::string, ExprPtr>>& props) {
  if (props.empty()) return "";
  std::string s = " {";
  for (std::size_t i = 0; i < props.size(); ++i) {
    if (i) s += ", ";
    s += var_text(props[i].first) + ": " + print_expr(*props[i].second);
  }
  return s + "}";
}

std::string hops_text(std::uint32_t lo, std::uint32_t hi) {
  if (lo == 1 && hi == 1) return "";
  return "*" + std::to_string(lo) + ".." + std::to_string(hi);
}

}  // namespace

bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  return expr_equal(*a, *b);
}

bool expr_equal(const Expr& a, const Expr& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, VarRef>) {
          return x.name == y.name;
        } else if constexpr (std::is_same_v<T, PropAccess>) {
          return x.var == y.var && x.key == y.key;
        } else if constexpr (std::is_same_v<T, SubProp>) {
          return x.sub_key == y.sub_key && expr_equal(x.base, y.base);
        } else if constexpr (std::is_same_v<T, LiteralFn>) {
          return x.fn == y.fn && expr_equal(x.arg, y.arg);
        } else if constexpr (std::is_same_v<T, Compare>) {
          return x.op == y.op && expr_equal(x.lhs, y.lhs) && expr_equal(x.rhs, y.rhs);
        } else if constexpr (std::is_same_v<T, BoolExpr>) {
          return x.op == y.op && expr_equal(x.lhs, y.lhs) && expr_equal(x.rhs, y.rhs);
        } else if constexpr (std::is_same_v<T, NotExpr>) {
          return expr_equal(x.operand, y.operand);
        } else if constexpr (std::is_same_v<T, Literal>) {
          return literal_equal(x.value, y.value);
        } else if constexpr (std::is_same_v<T, Param>) {
          return x.name == y.name;
        } else {
          return x.a == y.a && x.b == y.b && x.rel_type == y.rel_type && x.min_hops == y.min_hops &&
                 x.max_hops == y.max_hops;
        }
      },
      a.node);
}

void collect_vars(const Expr& e, std::vector<std::string>& out) {
  auto add = [&](const std::string& v) {
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  };
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, VarRef>) {
          add(x.name);
        } else if constexpr (std::is_same_v<T, PropAccess>) {
          add(x.var);
        } else if constexpr (std::is_same_v<T, SubProp>) {
          collect_vars(*x.base, out);
        } else if constexpr (std::is_same_v<T, LiteralFn>) {
          collect_vars(*x.arg, out);
        } else if constexpr (std::is_same_v<T, Compare> || std::is_same_v<T, BoolExpr>) {
          collect_vars(*x.lhs, out);
          collect_vars(*x.rhs, out);
        } else if constexpr (std::is_same_v<T, NotExpr>) {
          collect_vars(*x.operand, out);
        } else if constexpr (std::is_same_v<T, ShortestPath>) {
          add(x.a);
          add(x.b);
        }
      },
      e.node);
}

std::vector<std::string> expr_vars(const Expr& e) {
  std::vector<std::string> out;
  collect_vars(e, out);
  std::sort(out.begin(), out.end());
  return out;
}

bool is_unstructured(const Expr& e) {
  return std::visit(
      [](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, SubProp>) {
          return true;
        } else if constexpr (std::is_same_v<T, Compare>) {
          return is_semantic(x.op) || is_unstructured(*x.lhs) || is_unstructured(*x.rhs);
        } else if constexpr (std::is_same_v<T, BoolExpr>) {
          return is_unstructured(*x.lhs) || is_unstructured(*x.rhs);
        } else if constexpr (std::is_same_v<T, NotExpr>) {
          return is_unstructured(*x.operand);
        } else if constexpr (std::is_same_v<T, LiteralFn>) {
          return is_unstructured(*x.arg);
        } else {
          return false;
        }
      },
      e.node);
}

std::string print_expr(const Expr& e) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, VarRef>) {
          return var_text(x.name);
        } else if constexpr (std::is_same_v<T, PropAccess>) {
          return var_text(x.var) + "." + name_text(x.key);
        } else if constexpr (std::is_same_v<T, SubProp>) {
          return wrap(*x.base, kPostfix) + "->" + name_text(x.sub_key);
        } else if constexpr (std::is_same_v<T, LiteralFn>) {
          return std::string("Blob.") + literal_fn_name(x.fn) + "(" + print_expr(*x.arg) + ")";
        } else if constexpr (std::is_same_v<T, Compare>) {
          return wrap(*x.lhs, kPostfix) + " " + cmp_op_text(x.op) + " " + wrap(*x.rhs, kPostfix);
        } else if constexpr (std::is_same_v<T, BoolExpr>) {
          int p = x.op == BoolOp::Or ? kOr : kAnd;
          return wrap(*x.lhs, p) + (x.op == BoolOp::Or ? " OR " : " AND ") + wrap(*x.rhs, p + 1);
        } else if constexpr (std::is_same_v<T, NotExpr>) {
          return "NOT " + wrap(*x.operand, kNot);
        } else if constexpr (std::is_same_v<T, Literal>) {
          return literal_text(x.value);
        } else if constexpr (std::is_same_v<T, Param>) {
          return "$" + x.name;
        } else {
          std::string rel = "[";
          if (x.rel_type) rel += ":" + name_text(*x.rel_type);
          rel += "*" + std::to_string(x.min_hops) + ".." + std::to_string(x.max_hops) + "]";
          return "shortestPath((" + var_text(x.a) + ")-" + rel + "-(" + var_text(x.b) + "))";
        }
      },
      e.node);
}

std::string print_pattern(const PathPattern& p) {
  std::string s;
  if (p.path_var) s += var_text(*p.path_var) + " = ";
  for (std::size_t i = 0; i < p.nodes.size(); ++i) {
    const auto& n = p.nodes[i];
    s += "(";
    if (n.var) s += var_text(*n.var);
    for (const auto& l : n.labels) s += ":" + name_text(l);
    s += props_text(n.props);
    s += ")";
    if (i < p.rels.size()) {
      const auto& r = p.rels[i];
      std::string body;
      if (r.var) body += var_text(*r.var);
      if (r.type) body += ":" + name_text(*r.type);
      body += hops_text(r.min_hops, r.max_hops);
      body += props_text(r.props);
      std::string mid = body.empty() ? "" : "[" + body + "]";
      if (r.direction == Direction::In) {
        s += "<-" + mid + "-";
      } else if (r.direction == Direction::Out) {
        s += "-" + mid + "->";
      } else {
        s += "-" + mid + "-";
      }
    }
  }
  return s;
}

std::string print_ast(const Ast& ast) {
  std::vector<std::string> parts;
  auto patterns = [](const std::vector<PathPattern>& ps) {
    std::string s;
    for (std::size_t i = 0; i < ps.size(); ++i) s += (i ? ", " : "") + print_pattern(ps[i]);
    return s;
  };
  if (!ast.match.empty()) parts.push_back("MATCH " + patterns(ast.match));
  if (ast.where) parts.push_back("WHERE " + print_expr(*ast.where));
  if (!ast.create.empty()) parts.push_back("CREATE " + patterns(ast.create));
  if (!ast.set.empty()) {
    std::string s = "SET ";
    for (std::size_t i = 0; i < ast.set.size(); ++i) {
      const auto& it = ast.set[i];
      if (i) s += ", ";
      if (it.label) {
        s += var_text(it.var) + ":" + name_text(*it.label);
      } else {
        s += var_text(it.var) + "." + name_text(*it.key) + " = " + print_expr(*it.value);
      }
    }
    parts.push_back(s);
  }
  if (!ast.del.empty()) {
    std::string s = ast.detach ? "DETACH DELETE " : "DELETE ";
    for (std::size_t i = 0; i < ast.del.size(); ++i) s += (i ? ", " : "") + var_text(ast.del[i]);
    parts.push_back(s);
  }
  if (!ast.ret.empty()) {
    std::string s = "RETURN ";
    for (std::size_t i = 0; i < ast.ret.size(); ++i) {
      if (i) s += ", ";
      s += print_expr(*ast.ret[i].expr);
      if (ast.ret[i].alias) s += " AS " + var_text(*ast.ret[i].alias);
    }
    parts.push_back(s);
  }
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? " " : "") + parts[i];
  return out;
}

bool ast_equal(const Ast& a, const Ast& b) {
  auto patterns_equal = [](const std::vector<PathPattern>& x, const std::vector<PathPattern>& y) {
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (!pattern_equal(x[i], y[i])) return false;
    return true;
  };
  if (!patterns_equal(a.match, b.match) || !patterns_equal(a.create, b.create)) return false;
  if (!expr_equal(a.where, b.where)) return false;
  if (a.set.size() != b.set.size()) return false;
  for (std::size_t i = 0; i < a.set.size(); ++i) {
    const auto &x = a.set[i], &y = b.set[i];
    if (x.var != y.var || x.key != y.key || x.label != y.label || !expr_equal(x.value, y.value)) return false;
  }
  if (a.del != b.del || a.detach != b.detach || a.ret.size() != b.ret.size()) return false;
  for (std::size_t i = 0; i < a.ret.size(); ++i) {
    if (a.ret[i].alias != b.ret[i].alias || !expr_equal(a.ret[i].expr, b.ret[i].expr)) return false;
  }
  return true;
}

std::string column_name(const ReturnItem& item) {
  return item.alias ? *item.alias : print_expr(*item.expr);
}

}  // namespace blobgraph::query
