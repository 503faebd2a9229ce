#pragma once

// Logical operator trees. Nodes are immutable and shared between candidate
// plans, so every node carries its cumulative estimates and a fingerprint
// computed once at construction.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "blobgraph/query/ast.hpp"

namespace blobgraph::plan {

enum class OpKind : std::uint8_t {
  Unit,  // one empty row; the input of queries without MATCH
  AllNodeScan,
  NodeByLabelScan,
  StructuredFilter,
  UnstructuredFilter,
  Expand,
  Join,
  ShortestPathOp,
  Projection,
};

const char* op_kind_name(OpKind k) noexcept;

// Relationship traversal from a bound node. `into` checks for a relationship
// between two bound nodes instead of binding a new one.
struct ExpandSpec {
  std::string from, rel, to;
  std::optional<std::string> type;
  Direction dir = Direction::Out;  // relative to `from`
  bool into = false;
};

struct LogicalOp;
using PlanPtr = std::shared_ptr<const LogicalOp>;

struct LogicalOp {
  OpKind kind = OpKind::Unit;

  std::string var;                  // scans; ShortestPathOp output
  std::vector<std::string> labels;  // scans: all must hold, the first is scanned
  query::ExprPtr pred;              // filters
  std::string filter_id;            // UnstructuredFilter
  bool indexed = false;             // StructuredFilter served by a property index
  ExpandSpec expand;
  std::vector<std::string> join_vars;  // empty: cartesian product
  query::ShortestPath path;
  std::vector<query::ReturnItem> items;  // Projection
  std::vector<std::string> columns;
  std::map<std::string, std::vector<std::string>> named_paths;

  std::vector<PlanPtr> children;
  std::vector<std::string> schema;  // bound variables, in binding order

  double est_card = 0.0;
  double op_cost = 0.0;
  double est_cost = 0.0;  // op_cost plus the children's est_cost
  std::string fingerprint;
};

// One-line description of the operator itself, without children or costs.
std::string describe(const LogicalOp& op);

// Indented tree, one operator per line with its estimates.
std::string explain(const LogicalOp& op);

std::size_t plan_size(const LogicalOp& op);

// Number of operators of `kind` in the tree.
std::size_t count_ops(const LogicalOp& op, OpKind kind);

// Depth-first, children before parents.
std::vector<const LogicalOp*> postorder(const LogicalOp& op);

}  // namespace blobgraph::plan
