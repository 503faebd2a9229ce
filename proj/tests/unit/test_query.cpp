#include <random>

#include "doctest.h"
#include "blobgraph/common/error.hpp"
#include "blobgraph/query/parser.hpp"
#include "blobgraph/query/query_graph.hpp"
#include "support/fixture_queries.hpp"

using namespace blobgraph;
using namespace blobgraph::query;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::CorruptFile;
}

std::string error_text(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

std::vector<Tok> kinds(std::string_view text) {
  std::vector<Tok> out;
  for (const auto& t : tokenize(text)) out.push_back(t.kind);
  return out;
}

// Random ASTs for the print/parse fixpoint.
class AstGen {
 public:
  explicit AstGen(std::uint64_t seed) : rng_(seed) {}

  Ast ast() {
    Ast a;
    vars_.clear();
    int npat = pick(0, 2);
    for (int i = 0; i < npat; ++i) a.match.push_back(pattern(false));
    if (!a.match.empty() && coin()) a.where = expr(3);
    if (coin(0.3)) a.create.push_back(pattern(true));
    if (!vars_.empty() && coin(0.2)) {
      SetItem s;
      s.var = vars_[pick(0, static_cast<int>(vars_.size()) - 1)];
      if (coin()) {
        s.label = name();
      } else {
        s.key = name();
        s.value = literal();
      }
      a.set.push_back(s);
    }
    if (!vars_.empty() && coin(0.1)) {
      a.del.push_back(vars_[0]);
      a.detach = coin();
    }
    if (a.match.empty() && a.create.empty() || coin(0.8)) {
      int n = pick(1, 3);
      for (int i = 0; i < n; ++i) {
        ReturnItem it{expr(2), std::nullopt};
        if (coin(0.3)) it.alias = var_name();
        a.ret.push_back(it);
      }
    }
    return a;
  }

 private:
  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }

  std::string name() {
    static const char* names[] = {"name", "photo", "Person", "teamMate", "x", "weird key", "match"};
    return names[pick(0, 6)];
  }
  std::string var_name() {
    static const char* names[] = {"n", "m", "a1", "_b", "where", "odd var"};
    return names[pick(0, 5)];
  }

  NodePat node(bool create) {
    NodePat n;
    if (create || coin(0.8)) {
      n.var = var_name();
      vars_.push_back(*n.var);
    }
    int nl = pick(0, 2);
    for (int i = 0; i < nl; ++i) n.labels.push_back(name());
    if (coin(0.3)) n.props.emplace_back(name(), literal());
    return n;
  }

  PathPattern pattern(bool create) {
    PathPattern p;
    if (!create && coin(0.2)) p.path_var = "p";
    p.nodes.push_back(node(create));
    int nr = pick(0, 2);
    for (int i = 0; i < nr; ++i) {
      RelPat r;
      if (coin(0.3)) r.var = "r" + std::to_string(i);
      if (create || coin(0.7)) r.type = name();
      r.direction = create ? (coin() ? Direction::Out : Direction::In)
                           : static_cast<Direction>(pick(0, 2));
      if (coin(0.2)) r.props.emplace_back(name(), literal());
      p.rels.push_back(r);
      p.nodes.push_back(node(create));
    }
    return p;
  }

  ExprPtr literal() {
    switch (pick(0, 5)) {
      case 0: return make_expr(Literal{static_cast<std::int64_t>(pick(-1000, 1000))});
      case 1: return make_expr(Literal{std::uniform_real_distribution<double>(-1e6, 1e6)(rng_)});
      case 2: return make_expr(Literal{std::string(coin() ? "it's \"q\"\n" : "Michael Jordan")});
      case 3: return make_expr(Literal{coin()});
      case 4: return make_expr(Param{"p" + std::to_string(pick(0, 9))});
      default: return make_expr(Literal{std::numeric_limits<std::int64_t>::min()});
    }
  }

  ExprPtr operand() {
    switch (pick(0, 5)) {
      case 0: return make_expr(VarRef{var_name()});
      case 1: return make_expr(PropAccess{var_name(), name()});
      case 2: {
        ExprPtr base = make_expr(PropAccess{var_name(), name()});
        int depth = pick(1, 2);
        for (int i = 0; i < depth; ++i) base = make_expr(SubProp{base, name()});
        return base;
      }
      case 3:
        return make_expr(LiteralFn{static_cast<LiteralFnKind>(pick(0, 2)), make_expr(Literal{std::string("file:///tmp/x")})});
      case 4:
        return make_expr(ShortestPath{var_name(), var_name(), coin() ? std::optional<std::string>("knows") : std::nullopt,
                                      1, static_cast<std::uint32_t>(pick(1, 4))});
      default: return literal();
    }
  }

  ExprPtr expr(int depth) {
    if (depth == 0) return operand();
    switch (pick(0, 4)) {
      case 0: return make_expr(BoolExpr{coin() ? BoolOp::And : BoolOp::Or, expr(depth - 1), expr(depth - 1)});
      case 1: return make_expr(NotExpr{expr(depth - 1)});
      case 2: {
        // Compare operands may be anything; the printer parenthesizes.
        ExprPtr l = coin(0.2) ? expr(depth - 1) : operand();
        ExprPtr r = coin(0.2) ? expr(depth - 1) : operand();
        return make_expr(Compare{static_cast<CmpOp>(pick(0, 10)), l, r});
      }
      case 3: return make_expr(SubProp{expr(depth - 1), name()});
      default: return operand();
    }
  }

  std::mt19937_64 rng_;
  std::vector<std::string> vars_;
};

}  // namespace

TEST_CASE("tokenizer basics") {
  CHECK(tokenize("").empty());
  CHECK(kinds("n.photo ~: m.photo") ==
        std::vector<Tok>{Tok::Ident, Tok::Dot, Tok::Ident, Tok::Similar, Tok::Ident, Tok::Dot, Tok::Ident});
  CHECK(kinds("a <:b") == std::vector<Tok>{Tok::Ident, Tok::ContainedIn, Tok::Ident});
  CHECK(code_of([] { tokenize("a < :b"); }) == ErrorCode::LexError);
  CHECK(kinds("x::y !: z >: w") == std::vector<Tok>{Tok::Ident, Tok::Similarity, Tok::Ident, Tok::NotSimilar,
                                                      Tok::Ident, Tok::Contains, Tok::Ident});
  CHECK(kinds("[*1..3]") == std::vector<Tok>{Tok::LBracket, Tok::Star, Tok::Integer, Tok::DotDot, Tok::Integer,
                                             Tok::RBracket});
  CHECK(kinds("(a)<--(b)") ==
        std::vector<Tok>{Tok::LParen, Tok::Ident, Tok::RParen, Tok::LeftArrow, Tok::Minus, Tok::LParen,
                         Tok::Ident, Tok::RParen});
  auto toks = tokenize("match (n)\n  RETURN n.match, 1.5, 'a\\'b', $p");
  CHECK(toks[0].kind == Tok::Keyword);
  CHECK(toks[0].text == "MATCH");
  CHECK(toks[4].line == 2);
  CHECK(toks[4].col == 3);
  CHECK(toks[7].kind == Tok::Ident);  // keyword spelling after '.'
  CHECK(toks[9].kind == Tok::Float);
  CHECK(toks[11].text == "a'b");
  CHECK(toks[13].kind == Tok::Param);
  CHECK(toks[13].text == "p");
  auto msg = error_text([] { tokenize("MATCH (n)\nWHERE n.x = 'open"); });
  CHECK(msg.find("2:13") != std::string::npos);
  CHECK(code_of([] { tokenize("a ! b"); }) == ErrorCode::LexError);
  CHECK(code_of([] { tokenize("12abc"); }) == ErrorCode::LexError);
}

TEST_CASE("fixture queries parse with the expected query-graph shape") {
  for (const auto& f : testing::fixture_queries()) {
    CAPTURE(f.name);
    Ast ast = parse_query(f.text);
    QueryGraph qg = to_query_graph(ast);
    CHECK(qg.nodes.size() == f.qnodes);
    CHECK(qg.edges.size() == f.qedges);
    CHECK(qg.attached().size() == f.attached);
    CHECK(qg.detached().size() + qg.detached(PredRole::Projection).size() == f.detached);
    Ast again = parse_query(print_ast(ast));
    CHECK(ast_equal(ast, again));
  }
}

TEST_CASE("details of the fixture parses") {
  Ast q2 = parse_query(
      "MATCH (n:person),(m:person) WHERE m.photo ~: Blob.fromURL('$url') AND n.firstName = '$name' "
      "RETURN shortestPath((n)-[*1..3]-(m));");
  CHECK(q2.match.size() == 2);
  REQUIRE(q2.ret.size() == 1);
  auto* sp = std::get_if<ShortestPath>(&q2.ret[0].expr->node);
  REQUIRE(sp);
  CHECK(sp->min_hops == 1);
  CHECK(sp->max_hops == 3);
  CHECK(sp->a == "n");
  CHECK(sp->b == "m");

  Ast jersey = parse_query(
      "MATCH (n:Person)-[:teamMate]->(m:Person) WHERE n.name='Michael Jordan' RETURN m.photo->jerseyNumber");
  REQUIRE(jersey.match.size() == 1);
  CHECK(jersey.match[0].rels[0].type == "teamMate");
  CHECK(jersey.match[0].rels[0].direction == Direction::Out);
  auto* sub = std::get_if<SubProp>(&jersey.ret[0].expr->node);
  REQUIRE(sub);
  CHECK(sub->sub_key == "jerseyNumber");
  CHECK(std::get<PropAccess>(sub->base->node).key == "photo");

  Ast minimal = parse_query("RETURN 1");
  CHECK(minimal.match.empty());
  CHECK(std::get<std::int64_t>(std::get<Literal>(minimal.ret[0].expr->node).value) == 1);

  Ast create = parse_query(testing::fixture_queries()[0].text);
  CHECK(create.create.size() == 3);
  CHECK(create.is_write());
  CHECK_FALSE(q2.is_write());

  QueryGraph qg = to_query_graph(parse_query(
      "MATCH (n:person),(m:person) WHERE n.firstName='$name1' AND m.firstName='$name2' RETURN n.photo ~: m.photo"));
  CHECK(qg.component_count() == 2);
  auto proj = qg.detached(PredRole::Projection);
  REQUIRE(proj.size() == 1);
  CHECK(proj[0]->unstructured);
  CHECK(proj[0]->filter_id == "photo|~:");
  CHECK(proj[0]->vars == std::vector<std::string>{"m", "n"});

  QueryGraph q4 = to_query_graph(parse_query(testing::fixture_queries().back().text));
  CHECK(q4.paths.at("p") == std::vector<std::string>{"n", "_e0", "m"});
  CHECK(q4.component_count() == 1);
}

TEST_CASE("precedence") {
  Ast a = parse_query("MATCH (a), (b), (c) WHERE a.p->f ~: b.p->f AND c.x RETURN a");
  auto& top = std::get<BoolExpr>(a.where->node);
  CHECK(top.op == BoolOp::And);
  auto& cmp = std::get<Compare>(top.lhs->node);
  CHECK(cmp.op == CmpOp::Similar);
  CHECK(std::holds_alternative<SubProp>(cmp.lhs->node));
  CHECK(std::holds_alternative<SubProp>(cmp.rhs->node));
  CHECK(std::holds_alternative<PropAccess>(top.rhs->node));

  Ast b = parse_query("MATCH (a) WHERE NOT a.x = 1 OR a.y = 2 AND a.z = 3 RETURN a");
  auto& orr = std::get<BoolExpr>(b.where->node);
  CHECK(orr.op == BoolOp::Or);
  auto& no = std::get<NotExpr>(orr.lhs->node);
  CHECK(std::get<Compare>(no.operand->node).op == CmpOp::Eq);
  CHECK(std::get<BoolExpr>(orr.rhs->node).op == BoolOp::And);

  Ast c = parse_query("MATCH (a) WHERE (a.x = 1 OR a.y = 2) AND a.z = 3 RETURN a");
  CHECK(std::get<BoolExpr>(c.where->node).op == BoolOp::And);
}

TEST_CASE("parse errors report position and expected tokens") {
  auto msg = error_text([] { parse_query("MATCH (n:Person RETURN n"); });
  CHECK(msg.find("ParseError") != std::string::npos);
  CHECK(msg.find("1:17") != std::string::npos);
  CHECK(msg.find("')'") != std::string::npos);

  msg = error_text([] { parse_query("MATCH (n) WHERE RETURN n"); });
  CHECK(msg.find("expected expression") != std::string::npos);

  msg = error_text([] { parse_query("MATCH (n) RETURN n n"); });
  CHECK(msg.find("','") != std::string::npos);
  CHECK(msg.find("end of input") != std::string::npos);

  CHECK(code_of([] { parse_query(""); }) == ErrorCode::ParseError);
  CHECK(code_of([] { parse_query("MATCH (a)-[*1..3]-(b) RETURN a"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { parse_query("MATCH (a) RETURN shortestPath((a)-[*1..3]->(a))"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { parse_query("CREATE (a)-[:t]-(b)"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { parse_query("CREATE (a)-->(b)"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { parse_query("MATCH (a)<-[:t]->(b) RETURN a"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { parse_query("MATCH (a) RETURN Blob.fromMars('x')"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { parse_query("MATCH (a) RETURN a = 1 = 2"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { parse_query("MATCH (a)-[*0..2]-(b) RETURN a"); }) == ErrorCode::ParseError);
}

TEST_CASE("query graph construction") {
  QueryGraph one = to_query_graph(parse_query("MATCH (a) RETURN a"));
  CHECK(one.nodes.size() == 1);
  CHECK(one.predicates.empty());

  QueryGraph in = to_query_graph(parse_query("MATCH (a)<-[r:owns]-(b:Person {name: 'x'}) RETURN a, r"));
  REQUIRE(in.edges.size() == 1);
  CHECK(in.nodes[in.edges[0].src].var == "b");
  CHECK(in.nodes[in.edges[0].tgt].var == "a");
  CHECK(in.edges[0].var == "r");
  REQUIRE(in.attached().size() == 1);
  CHECK(*in.attached()[0]->qnode == *in.node_index("b"));

  QueryGraph shared = to_query_graph(parse_query("MATCH (a)-[:x]->(b), (b:Foo)-[:y]->(c:Bar:Foo) RETURN c"));
  CHECK(shared.nodes.size() == 3);
  CHECK(shared.nodes[1].labels == std::vector<std::string>{"Foo"});
  CHECK(shared.component_count() == 1);

  QueryGraph anon = to_query_graph(parse_query("MATCH (:A)--(:B) RETURN 1"));
  CHECK(anon.nodes.size() == 2);
  CHECK(anon.edges[0].direction == Direction::Both);

  QueryGraph mixed = to_query_graph(parse_query(
      "MATCH (a)-[:k]->(b) WHERE a.x = 1 AND (a.y = 2 OR b.y = 3) AND a.photo->face ~: b.photo->face RETURN b"));
  CHECK(mixed.attached().size() == 1);
  CHECK(mixed.detached().size() == 2);
  CHECK(mixed.detached()[1]->unstructured);
  CHECK_FALSE(mixed.detached()[0]->unstructured);

  CHECK(code_of([] { to_query_graph(parse_query("MATCH (a) WHERE b.x = 1 RETURN a")); }) ==
        ErrorCode::UnboundVariable);
  CHECK(code_of([] { to_query_graph(parse_query("MATCH (a) RETURN c")); }) == ErrorCode::UnboundVariable);
  CHECK(code_of([] { to_query_graph(parse_query("MATCH (a) SET z.k = 1")); }) == ErrorCode::UnboundVariable);
  CHECK(code_of([] { to_query_graph(parse_query("MATCH (a) RETURN shortestPath((a)-[*1..2]-(q))")); }) ==
        ErrorCode::UnboundVariable);
  CHECK_NOTHROW(to_query_graph(parse_query("CREATE (a:X)-[:t]->(b) RETURN a, b")));
  CHECK(code_of([] { to_query_graph(parse_query("MATCH (a)-[r:t]->(b), (b)-[r:t]->(c) RETURN a")); }) ==
        ErrorCode::ParseError);
}

TEST_CASE("print then parse is a fixpoint on random ASTs") {
  AstGen gen(2024);
  int checked = 0;
  for (int i = 0; i < 2000; ++i) {
    Ast a = gen.ast();
    if (a.match.empty() && a.create.empty() && a.ret.empty()) continue;
    std::string text = print_ast(a);
    CAPTURE(text);
    Ast b;
    REQUIRE_NOTHROW(b = parse_query(text));
    CHECK(ast_equal(a, b));
    CHECK(print_ast(b) == text);
    ++checked;
  }
  CHECK(checked > 1500);
}
