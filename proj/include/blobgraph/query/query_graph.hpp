#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "blobgraph/query/ast.hpp"

namespace blobgraph::query {

struct QNode {
  std::string var;  // anonymous pattern nodes get "_n<k>"
  std::vector<std::string> labels;
};

struct QEdge {
  std::string var;  // anonymous relationships get "_e<k>"
  std::size_t src = 0, tgt = 0;  // q-node indexes; In patterns are flipped to Out
  std::optional<std::string> type;
  Direction direction = Direction::Out;  // Out or Both
};

enum class PredRole : std::uint8_t { Filter, Projection };

struct Predicate {
  ExprPtr expr;
  std::vector<std::string> vars;  // sorted
  bool unstructured = false;
  PredRole role = PredRole::Filter;
  // Set when the predicate mentions exactly one q-node variable and nothing else.
  std::optional<std::size_t> qnode;
  // Identity used for speed statistics of unstructured predicates.
  std::string filter_id;
};

struct QueryGraph {
  std::vector<QNode> nodes;
  std::vector<QEdge> edges;
  std::vector<Predicate> predicates;
  std::vector<ReturnItem> projection;
  // Named paths: alternating node and relationship variables.
  std::map<std::string, std::vector<std::string>> paths;
  std::vector<std::size_t> component;  // per q-node

  std::optional<std::size_t> node_index(const std::string& var) const;
  std::size_t component_count() const;
  std::vector<const Predicate*> attached(PredRole role = PredRole::Filter) const;
  std::vector<const Predicate*> detached(PredRole role = PredRole::Filter) const;
};

// Splits a conjunction at its top-level ANDs.
std::vector<ExprPtr> conjuncts(const ExprPtr& e);

std::string filter_id_for(const Expr& e);

// One q-node per distinct node variable of the MATCH patterns. UnboundVariable
// if WHERE, RETURN, SET or DELETE mention a variable bound by neither MATCH nor
// CREATE.
QueryGraph to_query_graph(const Ast& ast);

}  // namespace blobgraph::query
