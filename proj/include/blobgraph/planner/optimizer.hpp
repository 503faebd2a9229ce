#pragma once

// Greedy plan construction over a query graph.
//
// The plan table starts with one scan per q-node. Each step collects the
// candidates (joins of two entries, expands of one entry along a q-edge, and
// single predicates applied to an entry), each with every structured
// predicate its variables now allow, keeps the cheapest, and drops the
// entries whose q-nodes it covers. Unstructured predicates are only applied
// when a step chooses them, so their placement follows their measured cost.

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "blobgraph/graph/graph_store.hpp"
#include "blobgraph/planner/cost_model.hpp"
#include "blobgraph/planner/logical_plan.hpp"
#include "blobgraph/query/query_graph.hpp"

namespace blobgraph::plan {

struct PlanningContext {
  GraphStats stats;
  SpeedSnapshot speeds;
  CardinalityModel card;
  CostModel cost;
  std::set<std::pair<std::string, std::string>> indexes;  // (label, key)
};

struct PlanEntry {
  PlanPtr plan;
  std::uint64_t nodes = 0;  // q-node bitmask
  std::uint64_t edges = 0;  // realized q-edges
  std::uint64_t preds = 0;  // applied filter predicates

  std::set<std::size_t> covered() const;
  double est_cost() const { return plan->est_cost; }
  double est_card() const { return plan->est_card; }
};

using PlanTable = std::vector<PlanEntry>;

struct TraceStep {
  std::vector<std::pair<std::string, double>> candidates;  // fingerprint, est_cost
  std::string chosen;
  std::vector<std::string> removed;
};

struct OptimizeResult {
  PlanPtr plan;
  std::size_t iterations = 0;
  std::vector<TraceStep> trace;
  std::size_t states = 0;  // exhaustive search only
};

// A structured single-variable predicate of the form var.key <op> expr, where
// expr mentions no variable. Such predicates may be served by an index.
struct PushdownForm {
  std::string key;
  query::CmpOp op;  // normalized so that the property is on the left
  query::ExprPtr operand;
};
std::optional<PushdownForm> pushdown_form(const query::Expr& pred, const std::string& var);

class Planner {
 public:
  Planner(const query::QueryGraph& qg, PlanningContext ctx);

  const query::QueryGraph& query_graph() const noexcept { return qg_; }
  const PlanningContext& context() const noexcept { return ctx_; }

  PlanTable leaf_plans() const;
  std::vector<PlanEntry> greedy_ordering(const PlanTable& table) const;
  // Lowest est_cost, then fewer covered q-nodes, then smaller fingerprint.
  static const PlanEntry& pick_best(const std::vector<PlanEntry>& candidates);
  PlanEntry apply_selections(PlanEntry e) const;
  // Removes the entries covered by `best`, attaches selections and inserts it.
  PlanTable advance(const PlanTable& table, const PlanEntry& best, std::vector<std::string>* removed = nullptr) const;
  // Leftover predicates, shortest paths and the projection on top of a
  // complete entry.
  PlanPtr finalize(const PlanEntry& e) const;

  OptimizeResult optimize() const;
  // Every single-variable predicate right above its scan, q-nodes connected by
  // expand followed by a join with the target's filtered scan.
  PlanPtr naive() const;
  // All step sequences of the greedy search space; the cheapest final plan.
  // Unsatisfiable when more than max_states table states are visited.
  OptimizeResult exhaustive(std::size_t max_states = 200000) const;

  // Operator factories with cost and cardinality estimates.
  PlanPtr unit() const;
  PlanPtr scan(std::size_t qnode) const;
  PlanPtr filter(PlanPtr child, const query::ExprPtr& pred) const;
  PlanPtr expand(PlanPtr child, std::size_t edge, std::size_t from) const;
  PlanPtr join(PlanPtr a, PlanPtr b) const;

 private:
  bool complete(const PlanEntry& e) const;
  double speed(const std::string& filter_id) const;

  query::QueryGraph qg_;
  PlanningContext ctx_;
  std::uint64_t filter_mask_ = 0;  // predicates with the Filter role
};

OptimizeResult optimize(const query::QueryGraph& qg, const PlanningContext& ctx);

}  // namespace blobgraph::plan
