#pragma once

// Pull-based execution of logical plans.
//
// Every operator hands out rows in batches. Output does not depend on the
// batch size. An UnstructuredFilter times its own work and, once its input
// is exhausted, records (elapsed seconds, input rows) in the speed registry
// under its filter id.

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "blobgraph/common/error.hpp"
#include "blobgraph/exec/datum.hpp"
#include "blobgraph/exec/evaluator.hpp"
#include "blobgraph/exec/exec_context.hpp"
#include "blobgraph/planner/logical_plan.hpp"
#include "blobgraph/query/ast.hpp"

namespace blobgraph {

// An error raised inside an operator, tagged with that operator.
class OperatorError : public Error {
 public:
  OperatorError(ErrorCode code, const std::string& message, std::string op)
      : Error(code, message + " (in " + op + ")"), op_(std::move(op)) {}
  const std::string& op() const noexcept { return op_; }

 private:
  std::string op_;
};

class Operator {
 public:
  Operator(std::string description, std::vector<std::string> schema)
      : description_(std::move(description)), schema_(std::move(schema)) {}
  virtual ~Operator() = default;

  const std::vector<std::string>& schema() const noexcept { return schema_; }
  const std::string& description() const noexcept { return description_; }

  // Replaces `out` with at most `max` rows. False, with `out` empty, once the
  // operator is exhausted.
  bool next(std::vector<Row>& out, std::size_t max);

 protected:
  virtual bool produce(std::vector<Row>& out, std::size_t max) = 0;

 private:
  std::string description_;
  std::vector<std::string> schema_;
};

using OperatorPtr = std::unique_ptr<Operator>;

// Builds the operator tree. A structured filter directly above a label scan
// becomes an index seek when a property index covers it.
OperatorPtr build_operator(const plan::LogicalOp& op, ExecContext& ctx, std::shared_ptr<QueryScratch> scratch);

struct ResultSet {
  std::vector<std::string> columns;
  std::vector<Row> rows;
};

// Runs a read plan until exhausted or until ctx.options.limit rows.
ResultSet execute(const plan::LogicalOp& plan, ExecContext& ctx);

// Runs a statement: the plan produces the MATCH bindings, then CREATE, SET and
// DELETE are applied per row and RETURN is evaluated over the result.
ResultSet execute_statement(const query::Ast& ast, const plan::LogicalOp& plan, ExecContext& ctx);

// Stores the bytes behind a Blob.fromX literal. Identical bytes still get a
// new id.
BlobId create_from_source(const query::LiteralFn& fn, ExecContext& ctx);

// Nodes satisfying a single-variable structured predicate, ascending. Served
// by a property index on one of `labels` when the predicate has the form
// var.key <op> constant; otherwise by a label scan.
std::vector<NodeId> pushdown_filter(const query::Expr& pred, const std::string& var,
                                    const std::vector<std::string>& labels, ExecContext& ctx);

}  // namespace blobgraph
