#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "blobgraph/graph/graph_store.hpp"
#include "blobgraph/graph/value.hpp"

namespace blobgraph::query {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

enum class CmpOp : std::uint8_t {
  Eq, Neq, Lt, Le, Gt, Ge,
  Similarity, Similar, NotSimilar, ContainedIn, Contains,
};

const char* cmp_op_text(CmpOp op) noexcept;
// True for the five semantic comparison symbols.
bool is_semantic(CmpOp op) noexcept;

enum class BoolOp : std::uint8_t { And, Or };
enum class LiteralFnKind : std::uint8_t { FromURL, FromFile, FromBytes };
const char* literal_fn_name(LiteralFnKind k) noexcept;

struct VarRef {
  std::string name;
};
struct PropAccess {
  std::string var;
  std::string key;
};
// base->sub_key
struct SubProp {
  ExprPtr base;
  std::string sub_key;
};
// Blob.fromURL(arg) and friends.
struct LiteralFn {
  LiteralFnKind fn;
  ExprPtr arg;
};
struct Compare {
  CmpOp op;
  ExprPtr lhs, rhs;
};
struct BoolExpr {
  BoolOp op;
  ExprPtr lhs, rhs;
};
struct NotExpr {
  ExprPtr operand;
};
struct Literal {
  Value value;
};
struct Param {
  std::string name;
};
// shortestPath((a)-[:type*min..max]-(b)); undirected.
struct ShortestPath {
  std::string a, b;
  std::optional<std::string> rel_type;
  std::uint32_t min_hops = 1, max_hops = 1;
};

struct Expr {
  std::variant<VarRef, PropAccess, SubProp, LiteralFn, Compare, BoolExpr, NotExpr, Literal, Param,
               ShortestPath>
      node;
};

template <typename T>
ExprPtr make_expr(T node) {
  return std::make_shared<const Expr>(Expr{std::move(node)});
}

bool expr_equal(const Expr& a, const Expr& b);
bool expr_equal(const ExprPtr& a, const ExprPtr& b);

// Variables mentioned anywhere in the expression.
void collect_vars(const Expr& e, std::vector<std::string>& out);
std::vector<std::string> expr_vars(const Expr& e);
// Contains a semantic comparison symbol or a sub-property extraction.
bool is_unstructured(const Expr& e);

struct NodePat {
  std::optional<std::string> var;
  std::vector<std::string> labels;
  std::vector<std::pair<std::string, ExprPtr>> props;
};

struct RelPat {
  std::optional<std::string> var;
  std::optional<std::string> type;
  Direction direction = Direction::Out;  // Out: a->b, In: a<-b, Both: a-b
  std::uint32_t min_hops = 1, max_hops = 1;
  std::vector<std::pair<std::string, ExprPtr>> props;
};

struct PathPattern {
  std::optional<std::string> path_var;  // p = (...)
  std::vector<NodePat> nodes;
  std::vector<RelPat> rels;  // rels.size() == nodes.size() - 1
};

struct ReturnItem {
  ExprPtr expr;
  std::optional<std::string> alias;
};

struct SetItem {
  std::string var;
  // Either a property assignment or a label addition.
  std::optional<std::string> key;
  ExprPtr value;
  std::optional<std::string> label;
};

struct Ast {
  std::vector<PathPattern> match;
  ExprPtr where;  // may be null
  std::vector<PathPattern> create;
  std::vector<SetItem> set;
  std::vector<std::string> del;
  bool detach = false;
  std::vector<ReturnItem> ret;

  bool is_write() const { return !create.empty() || !set.empty() || !del.empty(); }
};

bool ast_equal(const Ast& a, const Ast& b);

// Canonical text. parse(print(ast)) is structurally equal to ast.
std::string print_expr(const Expr& e);
std::string print_pattern(const PathPattern& p);
std::string print_ast(const Ast& ast);

// Column header for a RETURN item.
std::string column_name(const ReturnItem& item);

}  // namespace blobgraph::query
