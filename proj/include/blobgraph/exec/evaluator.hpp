#pragma once

// Expression evaluation over one row, with three-valued logic: a null operand
// makes a comparison null, and a filter keeps a row only when its predicate is
// true.

#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "blobgraph/exec/datum.hpp"
#include "blobgraph/exec/exec_context.hpp"
#include "blobgraph/query/ast.hpp"

namespace blobgraph {

// State shared by the operators of one query: fetched literal BLOBs and
// their extractions, so a literal is read and analysed once per query.
class QueryScratch {
 public:
  TransientBlobPtr literal(const query::Expr* key, const std::function<TransientBlobPtr()>& load);
  SemanticValue transient_extract(const TransientBlobPtr& blob, const std::string& sub_key,
                                  const std::function<SemanticValue()>& compute);

 private:
  std::mutex mu_;
  std::map<const query::Expr*, TransientBlobPtr> literals_;
  std::map<std::pair<const TransientBlob*, std::string>, SemanticValue> extracted_;
};

using NamedPaths = std::map<std::string, std::vector<std::string>>;

class Evaluator {
 public:
  Evaluator(ExecContext& ctx, std::vector<std::string> schema, std::shared_ptr<QueryScratch> scratch = nullptr,
            NamedPaths paths = {});

  const std::vector<std::string>& schema() const noexcept { return schema_; }
  std::optional<std::size_t> slot(const std::string& var) const;

  Datum eval(const query::Expr& e, const Row& row);
  // nullopt when the expression is null. EvaluationError if not a boolean.
  std::optional<bool> truth(const query::Expr& e, const Row& row);

  // Starts the extractions `e` will need for `row` without waiting for them.
  void prefetch(const query::Expr& e, const Row& row, std::vector<std::shared_future<SemanticValue>>& out);

  // The bytes behind a Blob.fromX literal.
  TransientBlobPtr literal_blob(const query::Expr& e, const query::LiteralFn& fn);

 private:
  ExtractionService& extraction() const;
  SemanticValue extract(const Datum& blob, const std::string& sub_key);
  Datum compare(const query::Compare& c, const Row& row);
  Datum semantic_compare(const query::Compare& c, const Row& row);
  const Value* param(const std::string& name) const;

  ExecContext& ctx_;
  std::vector<std::string> schema_;
  std::unordered_map<std::string, std::size_t> slots_;
  std::shared_ptr<QueryScratch> scratch_;
  NamedPaths paths_;
};

// Bytes for a literal source: hex for fromBytes, a local path for fromFile,
// file:// or http(s):// for fromURL. SourceUnavailable when unreachable.
TransientBlobPtr fetch_source(query::LiteralFnKind fn, const std::string& arg, const ExecContext& ctx);

}  // namespace blobgraph
