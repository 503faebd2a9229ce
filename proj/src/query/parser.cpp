#include "blobgraph/query/parser.hpp"

#include <charconv>
#include <cstdlib>
#include <limits>

#include "blobgraph/common/error.hpp"

namespace blobgraph::query {

namespace {

enum class PatternCtx { Match, Create, Shortest };

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) != std::tolower(static_cast<unsigned char>(b[i]))) {
      return false;
    }
  }
  return true;
}

class Parser {
 public:
  explicit Parser(const std::vector<Token>& tokens) : toks_(tokens) {
    Token end{Tok::End, {}, {}, 1, 1, 0};
    if (!toks_.empty()) {
      const auto& last = toks_.back();
      end.line = last.line;
      end.col = last.col + static_cast<std::uint32_t>(last.text.size());
      end.offset = last.offset + last.text.size();
    }
    toks_.push_back(end);
  }

  Ast query() {
    if (toks_.size() == 1) fail({"MATCH", "CREATE", "RETURN"});
    Ast ast;
    while (accept_kw("MATCH")) patterns(ast.match, PatternCtx::Match);
    if (accept_kw("WHERE")) ast.where = expr();
    for (;;) {
      if (accept_kw("CREATE")) {
        patterns(ast.create, PatternCtx::Create);
      } else if (accept_kw("SET")) {
        set_items(ast);
      } else if (at_kw("DETACH") || at_kw("DELETE")) {
        if (accept_kw("DETACH")) ast.detach = true;
        expect_kw("DELETE");
        do {
          ast.del.push_back(ident("variable"));
        } while (accept(Tok::Comma));
      } else {
        break;
      }
    }
    if (accept_kw("RETURN")) {
      do {
        ReturnItem item{expr(), std::nullopt};
        if (accept_kw("AS")) item.alias = ident("alias");
        ast.ret.push_back(std::move(item));
      } while (accept(Tok::Comma));
    }
    accept(Tok::Semicolon);
    if (!at(Tok::End)) {
      std::vector<std::string> want;
      if (ast.ret.empty()) {
        if (ast.where == nullptr && ast.create.empty() && ast.set.empty() && ast.del.empty()) {
          want = {"MATCH", "WHERE"};
        }
        want.insert(want.end(), {"CREATE", "SET", "DELETE", "RETURN"});
      } else {
        want = {"','", "AS"};
      }
      want.push_back("';'");
      want.push_back(tok_name(Tok::End));
      fail(want);
    }
    if (ast.match.empty() && ast.create.empty() && ast.ret.empty()) {
      fail({"MATCH", "CREATE", "RETURN"});
    }
    return ast;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  bool at(Tok k) const { return peek().kind == k; }
  bool at_kw(std::string_view kw) const { return at(Tok::Keyword) && peek().text == kw; }
  const Token& advance() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  bool accept(Tok k) {
    if (!at(k)) return false;
    advance();
    return true;
  }
  bool accept_kw(std::string_view kw) {
    if (!at_kw(kw)) return false;
    advance();
    return true;
  }

  [[noreturn]] void fail(const std::vector<std::string>& expected) const {
    const Token& t = peek();
    std::string msg = std::to_string(t.line) + ":" + std::to_string(t.col) + ": expected ";
    for (std::size_t i = 0; i < expected.size(); ++i) msg += (i ? ", " : "") + expected[i];
    msg += "; got ";
    msg += t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    raise(ErrorCode::ParseError, msg);
  }
  [[noreturn]] void fail_msg(const Token& t, const std::string& what) const {
    raise(ErrorCode::ParseError, std::to_string(t.line) + ":" + std::to_string(t.col) + ": " + what);
  }

  const Token& expect(Tok k) {
    if (!at(k)) fail({tok_name(k)});
    return advance();
  }
  void expect_kw(std::string_view kw) {
    if (!at_kw(kw)) fail({std::string(kw)});
    advance();
  }
  std::string ident(const char* what) {
    if (!at(Tok::Ident)) fail({std::string(what)});
    return advance().text;
  }
  // Labels, types and keys after '.' may spell a keyword.
  std::string name(const char* what) {
    if (at(Tok::Keyword)) return advance().raw;
    return ident(what);
  }

  void patterns(std::vector<PathPattern>& out, PatternCtx ctx) {
    do {
      out.push_back(pattern(ctx));
    } while (accept(Tok::Comma));
  }

  PathPattern pattern(PatternCtx ctx) {
    PathPattern p;
    if (ctx != PatternCtx::Shortest && at(Tok::Ident) && peek(1).kind == Tok::Eq) {
      p.path_var = advance().text;
      advance();
    }
    p.nodes.push_back(node_pat(ctx));
    while (at(Tok::Minus) || at(Tok::LeftArrow)) {
      p.rels.push_back(rel_pat(ctx));
      p.nodes.push_back(node_pat(ctx));
    }
    return p;
  }

  std::vector<std::pair<std::string, ExprPtr>> props() {
    std::vector<std::pair<std::string, ExprPtr>> out;
    expect(Tok::LBrace);
    if (accept(Tok::RBrace)) return out;
    do {
      std::string key = ident("property key");
      expect(Tok::Colon);
      out.emplace_back(std::move(key), expr());
    } while (accept(Tok::Comma));
    expect(Tok::RBrace);
    return out;
  }

  NodePat node_pat(PatternCtx ctx) {
    const Token& open = expect(Tok::LParen);
    NodePat n;
    if (at(Tok::Ident)) n.var = advance().text;
    while (accept(Tok::Colon)) n.labels.push_back(name("label"));
    if (at(Tok::LBrace)) n.props = props();
    if (!at(Tok::RParen)) {
      std::vector<std::string> want;
      if (!n.var && n.labels.empty() && n.props.empty()) want.push_back("variable");
      if (n.props.empty()) want.insert(want.end(), {"':'", "'{'"});
      want.push_back("')'");
      fail(want);
    }
    advance();
    if (ctx == PatternCtx::Shortest && (!n.var || !n.labels.empty() || !n.props.empty())) {
      fail_msg(open, "shortestPath endpoints must be bare variables");
    }
    return n;
  }

  std::uint32_t hop_count() {
    const Token& t = expect(Tok::Integer);
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc() || v > std::numeric_limits<std::uint32_t>::max()) fail_msg(t, "hop count out of range");
    return static_cast<std::uint32_t>(v);
  }

  RelPat rel_pat(PatternCtx ctx) {
    const Token& start = peek();
    RelPat r;
    bool left = accept(Tok::LeftArrow);
    if (!left) expect(Tok::Minus);
    bool ranged = false;
    if (accept(Tok::LBracket)) {
      if (at(Tok::Ident)) r.var = advance().text;
      if (accept(Tok::Colon)) r.type = name("relationship type");
      if (accept(Tok::Star)) {
        ranged = true;
        bool lo_given = false;
        if (at(Tok::Integer)) {
          r.min_hops = r.max_hops = hop_count();
          lo_given = true;
        }
        if (accept(Tok::DotDot)) {
          if (!lo_given) r.min_hops = 1;
          r.max_hops = hop_count();
        } else if (!lo_given) {
          fail({"integer", "'..'"});
        }
        if (r.min_hops < 1) fail_msg(start, "minimum hop count must be at least 1");
        if (r.max_hops < r.min_hops) fail_msg(start, "hop range upper bound below lower bound");
      }
      if (at(Tok::LBrace)) r.props = props();
      if (!at(Tok::RBracket)) {
        std::vector<std::string> want;
        if (!r.type && !ranged && r.props.empty()) want.push_back("':'");
        if (!ranged && r.props.empty()) want.push_back("'*'");
        if (r.props.empty()) want.push_back("'{'");
        want.push_back("']'");
        fail(want);
      }
      advance();
    }
    bool right = false;
    if (accept(Tok::Arrow)) {
      right = true;
    } else if (!accept(Tok::Minus)) {
      fail(left ? std::vector<std::string>{"'-'"} : std::vector<std::string>{"'-'", "'->'"});
    }
    if (left && right) fail_msg(start, "a relationship cannot point both ways");
    r.direction = left ? Direction::In : right ? Direction::Out : Direction::Both;

    switch (ctx) {
      case PatternCtx::Match:
        if (ranged && (r.min_hops != 1 || r.max_hops != 1)) {
          fail_msg(start, "variable-length relationships are only allowed inside shortestPath");
        }
        break;
      case PatternCtx::Create:
        if (ranged) fail_msg(start, "CREATE relationships cannot have a hop range");
        if (!r.type) fail_msg(start, "CREATE relationships need a type");
        if (r.direction == Direction::Both) fail_msg(start, "CREATE relationships need a direction");
        break;
      case PatternCtx::Shortest:
        if (r.direction != Direction::Both) fail_msg(start, "shortestPath patterns are undirected");
        if (r.var || !r.props.empty()) fail_msg(start, "shortestPath relationships take only a type and range");
        break;
    }
    return r;
  }

  void set_items(Ast& ast) {
    do {
      SetItem item;
      item.var = ident("variable");
      if (accept(Tok::Colon)) {
        item.label = name("label");
      } else if (accept(Tok::Dot)) {
        item.key = name("property key");
        expect(Tok::Eq);
        item.value = expr();
      } else {
        fail({"'.'", "':'"});
      }
      ast.set.push_back(std::move(item));
    } while (accept(Tok::Comma));
  }

  ExprPtr expr() { return or_expr(); }

  ExprPtr or_expr() {
    ExprPtr l = and_expr();
    while (accept_kw("OR")) l = make_expr(BoolExpr{BoolOp::Or, l, and_expr()});
    return l;
  }

  ExprPtr and_expr() {
    ExprPtr l = not_expr();
    while (accept_kw("AND")) l = make_expr(BoolExpr{BoolOp::And, l, not_expr()});
    return l;
  }

  ExprPtr not_expr() {
    if (accept_kw("NOT")) return make_expr(NotExpr{not_expr()});
    return cmp_expr();
  }

  std::optional<CmpOp> cmp_op() const {
    switch (peek().kind) {
      case Tok::Eq: return CmpOp::Eq;
      case Tok::Neq: return CmpOp::Neq;
      case Tok::Lt: return CmpOp::Lt;
      case Tok::Le: return CmpOp::Le;
      case Tok::Gt: return CmpOp::Gt;
      case Tok::Ge: return CmpOp::Ge;
      case Tok::Similarity: return CmpOp::Similarity;
      case Tok::Similar: return CmpOp::Similar;
      case Tok::NotSimilar: return CmpOp::NotSimilar;
      case Tok::ContainedIn: return CmpOp::ContainedIn;
      case Tok::Contains: return CmpOp::Contains;
      default: return std::nullopt;
    }
  }

  ExprPtr cmp_expr() {
    ExprPtr l = postfix();
    if (auto op = cmp_op()) {
      advance();
      l = make_expr(Compare{*op, l, postfix()});
    }
    return l;
  }

  ExprPtr postfix() {
    ExprPtr e = primary();
    for (;;) {
      if (at(Tok::Dot)) {
        const Token& dot = advance();
        auto* v = std::get_if<VarRef>(&e->node);
        if (!v) fail_msg(dot, "property access needs a variable on the left");
        e = make_expr(PropAccess{v->name, name("property key")});
      } else if (accept(Tok::Arrow)) {
        e = make_expr(SubProp{e, name("sub-property key")});
      } else {
        return e;
      }
    }
  }

  ExprPtr number(bool negate) {
    const Token& t = advance();
    if (t.kind == Tok::Float) {
      double d = std::strtod(t.text.c_str(), nullptr);
      return make_expr(Literal{negate ? -d : d});
    }
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    constexpr auto kMax = static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max());
    if (ec != std::errc() || v > kMax + (negate ? 1 : 0)) fail_msg(t, "integer literal out of range");
    std::int64_t out = negate ? static_cast<std::int64_t>(0 - v) : static_cast<std::int64_t>(v);
    return make_expr(Literal{out});
  }

  ExprPtr primary() {
    switch (peek().kind) {
      case Tok::Integer:
      case Tok::Float:
        return number(false);
      case Tok::Minus:
        if (peek(1).kind == Tok::Integer || peek(1).kind == Tok::Float) {
          advance();
          return number(true);
        }
        break;
      case Tok::String:
        return make_expr(Literal{advance().text});
      case Tok::Param:
        return make_expr(Param{advance().text});
      case Tok::Keyword:
        if (accept_kw("TRUE")) return make_expr(Literal{true});
        if (accept_kw("FALSE")) return make_expr(Literal{false});
        break;
      case Tok::LParen: {
        advance();
        ExprPtr e = expr();
        expect(Tok::RParen);
        return e;
      }
      case Tok::Ident: {
        const Token& t = peek();
        if (iequals(t.text, "shortestPath") && peek(1).kind == Tok::LParen) return shortest_path();
        if (iequals(t.text, "Blob") && peek(1).kind == Tok::Dot && peek(2).kind == Tok::Ident &&
            peek(3).kind == Tok::LParen) {
          return literal_fn();
        }
        return make_expr(VarRef{advance().text});
      }
      default:
        break;
    }
    fail({"expression"});
  }

  ExprPtr literal_fn() {
    advance();  // Blob
    advance();  // .
    const Token& name = advance();
    LiteralFnKind kind;
    if (iequals(name.text, "fromURL")) {
      kind = LiteralFnKind::FromURL;
    } else if (iequals(name.text, "fromFile")) {
      kind = LiteralFnKind::FromFile;
    } else if (iequals(name.text, "fromBytes")) {
      kind = LiteralFnKind::FromBytes;
    } else {
      fail_msg(name, "unknown literal function Blob." + name.text + " (expected fromURL, fromFile, fromBytes)");
    }
    expect(Tok::LParen);
    ExprPtr arg = expr();
    expect(Tok::RParen);
    return make_expr(LiteralFn{kind, arg});
  }

  ExprPtr shortest_path() {
    advance();
    expect(Tok::LParen);
    PathPattern p = pattern(PatternCtx::Shortest);
    if (p.nodes.size() != 2) {
      fail(p.nodes.size() < 2 ? std::vector<std::string>{"'-'"} : std::vector<std::string>{"')'"});
    }
    expect(Tok::RParen);
    const RelPat& r = p.rels[0];
    return make_expr(ShortestPath{*p.nodes[0].var, *p.nodes[1].var, r.type, r.min_hops, r.max_hops});
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

Ast parse(const std::vector<Token>& tokens) { return Parser(tokens).query(); }

Ast parse_query(std::string_view text) { return parse(tokenize(text)); }

}  // namespace blobgraph::query
