#include "blobgraph/exec/evaluator.hpp"

#include <cctype>
#include <filesystem>

#include "blobgraph/common/error.hpp"
#include "blobgraph/common/file_util.hpp"
#include "blobgraph/exec/shortest_path.hpp"

namespace blobgraph {

using namespace query;

TransientBlobPtr QueryScratch::literal(const Expr* key, const std::function<TransientBlobPtr()>& load) {
  {
    std::lock_guard lock(mu_);
    auto it = literals_.find(key);
    if (it != literals_.end()) return it->second;
  }
  auto blob = load();
  std::lock_guard lock(mu_);
  return literals_.emplace(key, std::move(blob)).first->second;
}

SemanticValue QueryScratch::transient_extract(const TransientBlobPtr& blob, const std::string& sub_key,
                                              const std::function<SemanticValue()>& compute) {
  auto key = std::make_pair(blob.get(), sub_key);
  {
    std::lock_guard lock(mu_);
    auto it = extracted_.find(key);
    if (it != extracted_.end()) return it->second;
  }
  auto v = compute();
  std::lock_guard lock(mu_);
  return extracted_.emplace(key, std::move(v)).first->second;
}

namespace {

std::optional<std::string> decode_hex(std::string_view s) {
  if (s.size() >= 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) s.remove_prefix(2);
  if (s.size() % 2) return std::nullopt;
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  std::string out;
  out.reserve(s.size() / 2);
  for (std::size_t i = 0; i < s.size(); i += 2) {
    int hi = nibble(s[i]), lo = nibble(s[i + 1]);
    if (hi < 0 || lo < 0) return std::nullopt;
    out.push_back(static_cast<char>(hi * 16 + lo));
  }
  return out;
}

TransientBlobPtr read_local(const std::string& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) raise(ErrorCode::SourceUnavailable, "no such file: " + path);
  try {
    return std::make_shared<TransientBlob>(TransientBlob{read_file(path), guess_mime(path)});
  } catch (const Error& e) {
    raise(ErrorCode::SourceUnavailable, e.what());
  }
}

std::optional<CompareSymbol> symbol_for(CmpOp op) {
  switch (op) {
    case CmpOp::Similarity: return CompareSymbol::Similarity;
    case CmpOp::Similar: return CompareSymbol::Similar;
    case CmpOp::NotSimilar: return CompareSymbol::NotSimilar;
    case CmpOp::ContainedIn: return CompareSymbol::ContainedIn;
    case CmpOp::Contains: return CompareSymbol::Contains;
    default: return std::nullopt;
  }
}

bool is_blob(const Datum& d) {
  if (std::holds_alternative<TransientBlobPtr>(d)) return true;
  const auto* v = std::get_if<Value>(&d);
  return v && std::holds_alternative<BlobRef>(*v);
}

// Scalar sub-property values take part in ordinary comparisons as plain values.
Datum scalar_form(Datum d) {
  if (const auto* s = std::get_if<SemanticValue>(&d)) {
    switch (semantic_kind(*s)) {
      case SemanticKind::Number: return Value{std::get<double>(*s)};
      case SemanticKind::Text: return Value{std::get<std::string>(*s)};
      case SemanticKind::Categorical: return Value{std::get<Categorical>(*s).value};
      case SemanticKind::Vector: break;
    }
  }
  return d;
}

// A plain value offered to a semantic comparison takes the kind of the other
// side.
SemanticValue coerce(const Datum& d, SemanticKind kind) {
  if (const auto* s = std::get_if<SemanticValue>(&d)) return *s;
  const auto* v = std::get_if<Value>(&d);
  if (v) {
    if (kind == SemanticKind::Number && is_numeric(*v)) return as_double(*v);
    if (const auto* t = std::get_if<std::string>(v)) {
      if (kind == SemanticKind::Text) return *t;
      if (kind == SemanticKind::Categorical) return Categorical{*t};
    }
  }
  raise(ErrorCode::KindMismatch, std::string("cannot compare a ") + semantic_kind_name(kind) +
                                     " sub-property with this operand");
}

std::optional<std::string> sub_key_of(const Expr& e) {
  if (const auto* s = std::get_if<SubProp>(&e.node)) return s->sub_key;
  return std::nullopt;
}

}  // namespace

TransientBlobPtr fetch_source(LiteralFnKind fn, const std::string& arg, const ExecContext& ctx) {
  switch (fn) {
    case LiteralFnKind::FromBytes: {
      auto bytes = decode_hex(arg);
      if (!bytes) raise(ErrorCode::SourceUnavailable, "fromBytes expects an even-length hex string");
      return std::make_shared<TransientBlob>(TransientBlob{std::move(*bytes), "application/octet-stream"});
    }
    case LiteralFnKind::FromFile: return read_local(arg);
    case LiteralFnKind::FromURL: {
      if (arg.rfind("file://", 0) == 0) return read_local(arg.substr(7));
      if (arg.rfind("http://", 0) == 0 || arg.rfind("https://", 0) == 0) {
        std::optional<std::string> body;
        if (ctx.fetcher) body = ctx.fetcher(arg);
        if (!body) raise(ErrorCode::SourceUnavailable, "cannot fetch " + arg);
        return std::make_shared<TransientBlob>(TransientBlob{std::move(*body), guess_mime(arg)});
      }
      raise(ErrorCode::SourceUnavailable, "unsupported URL scheme: " + arg);
    }
  }
  raise(ErrorCode::SourceUnavailable, "unknown source");
}

Evaluator::Evaluator(ExecContext& ctx, std::vector<std::string> schema, std::shared_ptr<QueryScratch> scratch,
                     NamedPaths paths)
    : ctx_(ctx), schema_(std::move(schema)), scratch_(std::move(scratch)), paths_(std::move(paths)) {
  if (!scratch_) scratch_ = std::make_shared<QueryScratch>();
  for (std::size_t i = 0; i < schema_.size(); ++i) slots_.emplace(schema_[i], i);
}

std::optional<std::size_t> Evaluator::slot(const std::string& var) const {
  auto it = slots_.find(var);
  if (it == slots_.end()) return std::nullopt;
  return it->second;
}

ExtractionService& Evaluator::extraction() const {
  if (!ctx_.extraction) raise(ErrorCode::NoExtractor, "no extraction service configured");
  return *ctx_.extraction;
}

const Value* Evaluator::param(const std::string& name) const {
  auto it = ctx_.params.find(name);
  return it == ctx_.params.end() ? nullptr : &it->second;
}

TransientBlobPtr Evaluator::literal_blob(const Expr& e, const LiteralFn& fn) {
  return scratch_->literal(&e, [&] {
    Datum arg = eval(*fn.arg, Row{});
    const auto* v = std::get_if<Value>(&arg);
    const auto* s = v ? std::get_if<std::string>(v) : nullptr;
    if (!s) raise(ErrorCode::EvaluationError, std::string("Blob.") + literal_fn_name(fn.fn) + " expects a string");
    return fetch_source(fn.fn, *s, ctx_);
  });
}

SemanticValue Evaluator::extract(const Datum& blob, const std::string& sub_key) {
  if (const auto* t = std::get_if<TransientBlobPtr>(&blob)) {
    return scratch_->transient_extract(*t, sub_key, [&] { return extraction().extract_bytes((*t)->bytes, sub_key); });
  }
  return extraction().extract(std::get<BlobRef>(std::get<Value>(blob)).id, sub_key);
}

Datum Evaluator::eval(const Expr& e, const Row& row) {
  return std::visit(
      [&](const auto& x) -> Datum {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, VarRef>) {
          if (auto s = slot(x.name)) return row.at(*s);
          auto p = paths_.find(x.name);
          if (p == paths_.end()) raise(ErrorCode::UnboundVariable, "variable " + x.name + " is not bound here");
          Path path;
          for (std::size_t i = 0; i < p->second.size(); ++i) {
            auto s = slot(p->second[i]);
            if (!s) raise(ErrorCode::UnboundVariable, "path element " + p->second[i] + " is not bound here");
            const Datum& d = row.at(*s);
            if (is_null(d)) return std::monostate{};
            if (i % 2 == 0) {
              path.nodes.push_back(std::get<NodeId>(d));
            } else {
              path.rels.push_back(std::get<RelId>(d));
            }
          }
          return path;
        } else if constexpr (std::is_same_v<T, PropAccess>) {
          auto s = slot(x.var);
          if (!s) raise(ErrorCode::UnboundVariable, "variable " + x.var + " is not bound here");
          const Datum& d = row.at(*s);
          std::optional<Value> v;
          if (const auto* n = std::get_if<NodeId>(&d)) {
            v = ctx_.graph->get_property(*n, x.key);
          } else if (const auto* r = std::get_if<RelId>(&d)) {
            v = ctx_.graph->get_property(*r, x.key);
          } else if (is_null(d)) {
            return std::monostate{};
          } else {
            raise(ErrorCode::EvaluationError, x.var + " is not a node or relationship");
          }
          if (!v) return std::monostate{};
          return *v;
        } else if constexpr (std::is_same_v<T, SubProp>) {
          Datum base = eval(*x.base, row);
          if (is_null(base)) return std::monostate{};
          if (!is_blob(base)) raise(ErrorCode::EvaluationError, "->" + x.sub_key + " applied to a non-BLOB value");
          return extract(base, x.sub_key);
        } else if constexpr (std::is_same_v<T, LiteralFn>) {
          return literal_blob(e, x);
        } else if constexpr (std::is_same_v<T, Compare>) {
          return is_semantic(x.op) ? semantic_compare(x, row) : compare(x, row);
        } else if constexpr (std::is_same_v<T, BoolExpr>) {
          auto l = truth(*x.lhs, row);
          if (x.op == BoolOp::And) {
            if (l == false) return Value{false};
            auto r = truth(*x.rhs, row);
            if (r == false) return Value{false};
            if (!l || !r) return std::monostate{};
            return Value{true};
          }
          if (l == true) return Value{true};
          auto r = truth(*x.rhs, row);
          if (r == true) return Value{true};
          if (!l || !r) return std::monostate{};
          return Value{false};
        } else if constexpr (std::is_same_v<T, NotExpr>) {
          auto v = truth(*x.operand, row);
          if (!v) return std::monostate{};
          return Value{!*v};
        } else if constexpr (std::is_same_v<T, Literal>) {
          // '$name' strings stand for parameters when one is bound.
          if (const auto* s = std::get_if<std::string>(&x.value); s && s->size() > 1 && (*s)[0] == '$') {
            if (const Value* p = param(s->substr(1))) return *p;
          }
          return x.value;
        } else if constexpr (std::is_same_v<T, Param>) {
          const Value* p = param(x.name);
          if (!p) raise(ErrorCode::EvaluationError, "missing parameter $" + x.name);
          return *p;
        } else {
          static_assert(std::is_same_v<T, ShortestPath>);
          auto sa = slot(x.a), sb = slot(x.b);
          if (!sa || !sb) raise(ErrorCode::UnboundVariable, "shortestPath endpoints must be bound");
          const Datum& a = row.at(*sa);
          const Datum& b = row.at(*sb);
          if (is_null(a) || is_null(b)) return std::monostate{};
          std::optional<std::string_view> type;
          if (x.rel_type) type = *x.rel_type;
          auto p = shortest_path(*ctx_.graph, std::get<NodeId>(a), std::get<NodeId>(b), x.min_hops, x.max_hops, type);
          if (!p) return std::monostate{};
          return *p;
        }
      },
      e.node);
}

std::optional<bool> Evaluator::truth(const Expr& e, const Row& row) {
  Datum d = eval(e, row);
  if (is_null(d)) return std::nullopt;
  if (const auto* v = std::get_if<Value>(&d)) {
    if (const auto* b = std::get_if<bool>(v)) return *b;
  }
  raise(ErrorCode::EvaluationError, "expected a boolean: " + print_expr(e));
}

Datum Evaluator::compare(const Compare& c, const Row& row) {
  Datum l = scalar_form(eval(*c.lhs, row));
  Datum r = scalar_form(eval(*c.rhs, row));
  if (is_null(l) || is_null(r)) return std::monostate{};
  if (c.op == CmpOp::Eq) return Value{datum_equal(l, r)};
  if (c.op == CmpOp::Neq) return Value{!datum_equal(l, r)};
  const auto* a = std::get_if<Value>(&l);
  const auto* b = std::get_if<Value>(&r);
  if (!a || !b) raise(ErrorCode::EvaluationError, std::string("operands of ") + cmp_op_text(c.op) + " are not ordered");
  auto ord = value_compare(*a, *b);
  if (!ord) return std::monostate{};
  switch (c.op) {
    case CmpOp::Lt: return Value{*ord < 0};
    case CmpOp::Le: return Value{*ord <= 0};
    case CmpOp::Gt: return Value{*ord > 0};
    case CmpOp::Ge: return Value{*ord >= 0};
    default: break;
  }
  raise(ErrorCode::EvaluationError, "unexpected comparison");
}

Datum Evaluator::semantic_compare(const Compare& c, const Row& row) {
  Datum l = eval(*c.lhs, row);
  Datum r = eval(*c.rhs, row);
  if (is_null(l) || is_null(r)) return std::monostate{};
  // BLOBs compared directly are analysed under the sub-property of the other
  // side, or the configured default.
  std::string sub_key;
  if (auto k = sub_key_of(*c.lhs)) {
    sub_key = *k;
  } else if (auto k2 = sub_key_of(*c.rhs)) {
    sub_key = *k2;
  } else if (is_blob(l) || is_blob(r)) {
    sub_key = extraction().options().default_sub_key;
  }
  if (is_blob(l)) l = extract(l, sub_key);
  if (is_blob(r)) r = extract(r, sub_key);
  SemanticValue a, b;
  if (const auto* s = std::get_if<SemanticValue>(&l)) {
    a = *s;
    b = coerce(r, semantic_kind(a));
  } else if (const auto* s2 = std::get_if<SemanticValue>(&r)) {
    b = *s2;
    a = coerce(l, semantic_kind(b));
  } else {
    raise(ErrorCode::EvaluationError,
          std::string("operator ") + cmp_op_text(c.op) + " needs a BLOB or sub-property operand");
  }
  return extraction().comparators().compare(*symbol_for(c.op), a, b, sub_key);
}

void Evaluator::prefetch(const Expr& e, const Row& row, std::vector<std::shared_future<SemanticValue>>& out) {
  if (!ctx_.extraction) return;
  auto start = [&](const Expr& base, const std::string& sub_key) {
    // Only cheap bases: a variable or a property, never another extraction.
    if (!std::holds_alternative<PropAccess>(base.node) && !std::holds_alternative<VarRef>(base.node)) return;
    try {
      Datum d = eval(base, row);
      if (const auto* v = std::get_if<Value>(&d)) {
        if (const auto* b = std::get_if<BlobRef>(v)) out.push_back(ctx_.extraction->extract_async(b->id, sub_key));
      }
    } catch (const Error&) {
      // Evaluation proper reports the error.
    }
  };
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, SubProp>) {
          start(*x.base, x.sub_key);
        } else if constexpr (std::is_same_v<T, Compare>) {
          if (is_semantic(x.op) && !sub_key_of(*x.lhs) && !sub_key_of(*x.rhs)) {
            const auto& key = ctx_.extraction->options().default_sub_key;
            start(*x.lhs, key);
            start(*x.rhs, key);
          }
          prefetch(*x.lhs, row, out);
          prefetch(*x.rhs, row, out);
        } else if constexpr (std::is_same_v<T, BoolExpr>) {
          prefetch(*x.lhs, row, out);
          prefetch(*x.rhs, row, out);
        } else if constexpr (std::is_same_v<T, NotExpr>) {
          prefetch(*x.operand, row, out);
        }
      },
      e.node);
}

}  // namespace blobgraph
