#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <queue>
#include <random>
#include <set>

#include "doctest.h"
#include "blobgraph/common/error.hpp"
#include "blobgraph/common/hash.hpp"
#include "blobgraph/exec/executor.hpp"
#include "blobgraph/exec/result_format.hpp"
#include "blobgraph/exec/shortest_path.hpp"
#include "support/example_graph.hpp"
#include "support/query_gen.hpp"
#include "support/world.hpp"

using namespace blobgraph;
using testing::Strategy;
using testing::World;

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

std::string text_of(const Datum& d) {
  const auto* v = std::get_if<Value>(&d);
  REQUIRE(v);
  return value_to_string(*v);
}

const plan::LogicalOp* find_op(const plan::LogicalOp& root, plan::OpKind kind) {
  for (const auto* op : plan::postorder(root))
    if (op->kind == kind) return op;
  return nullptr;
}

// The example graph with a photo on the pet and on each person.
void load_example(World& w) {
  w.graph = testing::example_graph();
  w.graph.set_property(NodeId{3}, "photo", Value{BlobRef{w.blobs->put_blob("a sleepy cat on a sofa", "image/jpeg")}});
  w.graph.set_property(NodeId{4}, "photo", Value{BlobRef{w.blobs->put_blob("jersey=33 portrait", "image/jpeg")}});
  w.graph.set_property(NodeId{4}, "name", Value{std::string("Scottie Pippen")});
}

// Hop distances ignoring direction; -1 when unreachable.
std::vector<std::vector<int>> floyd_warshall(const GraphStore& g, int n) {
  const int inf = 1 << 20;
  std::vector<std::vector<int>> d(n + 1, std::vector<int>(n + 1, inf));
  for (int i = 1; i <= n; ++i) d[i][i] = 0;
  g.for_each_rel([&](RelId r) {
    int a = static_cast<int>(g.src(r).value), b = static_cast<int>(g.tgt(r).value);
    if (a != b) d[a][b] = d[b][a] = 1;
  });
  for (int k = 1; k <= n; ++k)
    for (int i = 1; i <= n; ++i)
      for (int j = 1; j <= n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  for (auto& row : d)
    for (auto& x : row)
      if (x >= inf) x = -1;
  return d;
}

bool adjacent_via(const GraphStore& g, NodeId a, RelId r, NodeId b) {
  return (g.src(r) == a && g.tgt(r) == b) || (g.src(r) == b && g.tgt(r) == a);
}

}  // namespace

TEST_CASE("label scan and name filter on the example graph return Michael Jordan") {
  World w;
  load_example(w);
  auto rs = w.run("MATCH (n:Person) WHERE n.name = 'Michael Jordan' RETURN n.name");
  REQUIRE(rs.rows.size() == 1);
  CHECK(rs.columns == std::vector<std::string>{"n.name"});
  CHECK(text_of(rs.rows[0][0]) == "Michael Jordan");

  auto pet = w.run("MATCH (n1)-[:hasPet]->(n3) WHERE n1.name = 'Michael Jordan' RETURN n3.photo->animal");
  REQUIRE(pet.rows.size() == 1);
  CHECK(std::get<SemanticValue>(pet.rows[0][0]) == SemanticValue{Categorical{"cat"}});

  auto jersey = w.run(
      "MATCH (n:Person)-[:teamMate]->(m:Person) WHERE n.name = 'Michael Jordan' RETURN m.name, "
      "m.photo->jerseyNumber");
  REQUIRE(jersey.rows.size() == 2);
  std::map<std::string, std::string> got;
  for (const auto& r : jersey.rows) got[render_datum(r[0], *w.blobs)] = render_datum(r[1], *w.blobs);
  CHECK(got["Scottie Pippen"] == "33");
  CHECK(got[""] == "");  // n8 has neither a name nor a photo
}

TEST_CASE("a plan over an empty store yields nothing and calls no extractor") {
  World w;
  auto rs = w.run("MATCH (n:Person)-[:hasPet]->(m) WHERE m.photo->animal = 'cat' AND n.photo ~: m.photo RETURN n, m");
  CHECK(rs.rows.empty());
  CHECK(w.extraction->extractor_calls() == 0);
  auto all = w.run("MATCH (n) RETURN n");
  CHECK(all.rows.empty());
}

TEST_CASE("RETURN without MATCH evaluates once") {
  World w;
  auto rs = w.run("RETURN 1 = 1");
  REQUIRE(rs.rows.size() == 1);
  CHECK(text_of(rs.rows[0][0]) == "true");
}

TEST_CASE("comparisons follow three-valued logic") {
  World w;
  w.graph.create_node({"P"}, {{"x", Value{std::int64_t{1}}}});
  w.graph.create_node({"P"}, {{"x", Value{std::string("one")}}});
  w.graph.create_node({"P"}, {});
  CHECK(w.run("MATCH (n:P) WHERE n.x = 1 RETURN n").rows.size() == 1);
  CHECK(w.run("MATCH (n:P) WHERE n.x = 1.0 RETURN n").rows.size() == 1);
  CHECK(w.run("MATCH (n:P) WHERE n.x < 5 RETURN n").rows.size() == 1);
  CHECK(w.run("MATCH (n:P) WHERE NOT n.x < 5 RETURN n").rows.empty());
  CHECK(w.run("MATCH (n:P) WHERE n.x <> 1 RETURN n").rows.size() == 1);
  CHECK(w.run("MATCH (n:P) WHERE n.x < 5 OR n.x = 'one' RETURN n").rows.size() == 2);
  auto rs = w.run("MATCH (n:P) RETURN n.x = 1");
  std::multiset<std::string> got;
  for (const auto& r : rs.rows) got.insert(datum_key(r[0]));
  CHECK(got == std::multiset<std::string>{"bool:true", "bool:false", "null"});
}

TEST_CASE("parameters bind $name and '$name'") {
  World w;
  load_example(w);
  ExecContext ctx = w.context();
  ctx.params["who"] = Value{std::string("Michael Jordan")};
  CHECK(w.run("MATCH (n) WHERE n.name = $who RETURN n", ctx).rows.size() == 1);
  CHECK(w.run("MATCH (n) WHERE n.name = '$who' RETURN n", ctx).rows.size() == 1);
  CHECK(w.run("MATCH (n) WHERE n.name = '$who' RETURN n").rows.empty());
  CHECK(code_of([&] { w.run("MATCH (n) WHERE n.name = $nobody RETURN n"); }) == ErrorCode::EvaluationError);
}

TEST_CASE("errors carry the failing operator") {
  World w;
  load_example(w);
  try {
    w.run("MATCH (n:Person) WHERE n.name->face ~: n.photo RETURN n");
    FAIL("expected an error");
  } catch (const OperatorError& e) {
    CHECK(e.code() == ErrorCode::EvaluationError);
    CHECK(e.op().rfind("UnstructuredFilter", 0) == 0);
  }
  ExecContext ctx = w.context();
  ctx.extraction = nullptr;
  CHECK(code_of([&] { w.run("MATCH (n:Pet) RETURN n.photo->animal", ctx); }) == ErrorCode::NoExtractor);
}

TEST_CASE("create_from_source stores the literal bytes") {
  World w;
  ExecContext ctx = w.context();
  query::LiteralFn hex{query::LiteralFnKind::FromBytes, query::make_expr(query::Literal{Value{std::string("00ff10")}})};
  BlobId a = create_from_source(hex, ctx);
  BlobId b = create_from_source(hex, ctx);
  CHECK(a != b);
  CHECK(w.blobs->read_all(a) == std::string("\x00\xff\x10", 3));
  CHECK(w.blobs->read_all(b) == w.blobs->read_all(a));

  auto dir = std::filesystem::temp_directory_path() / "bg_exec_source";
  std::filesystem::create_directories(dir);
  auto file = dir / "photo.bin";
  std::string payload;
  std::mt19937_64 rng(5);
  for (int i = 0; i < 40000; ++i) payload.push_back(static_cast<char>(rng() & 0xff));
  std::ofstream(file, std::ios::binary) << payload;

  auto lit = [](query::LiteralFnKind k, std::string s) {
    return query::LiteralFn{k, query::make_expr(query::Literal{Value{std::move(s)}})};
  };
  BlobId via_url = create_from_source(lit(query::LiteralFnKind::FromURL, "file://" + file.string()), ctx);
  BlobId via_file = create_from_source(lit(query::LiteralFnKind::FromFile, file.string()), ctx);
  CHECK(fnv1a64(w.blobs->read_all(via_url)) == fnv1a64(payload));
  CHECK(fnv1a64(w.blobs->read_all(via_file)) == fnv1a64(payload));

  CHECK(code_of([&] { create_from_source(lit(query::LiteralFnKind::FromFile, (dir / "missing").string()), ctx); }) ==
        ErrorCode::SourceUnavailable);
  CHECK(code_of([&] { create_from_source(lit(query::LiteralFnKind::FromURL, "http://example.test/p.jpg"), ctx); }) ==
        ErrorCode::SourceUnavailable);
  CHECK(code_of([&] { create_from_source(lit(query::LiteralFnKind::FromBytes, "abc"), ctx); }) ==
        ErrorCode::SourceUnavailable);

  ctx.fetcher = [](const std::string& url) -> std::optional<std::string> {
    if (url == "http://example.test/p.jpg") return std::string("fetched");
    return std::nullopt;
  };
  BlobId fetched = create_from_source(lit(query::LiteralFnKind::FromURL, "http://example.test/p.jpg"), ctx);
  CHECK(w.blobs->read_all(fetched) == "fetched");
  CHECK(w.blobs->blob_meta(fetched).mime == "image/jpeg");
  std::filesystem::remove_all(dir);
}

TEST_CASE("literal BLOBs in a read query are fetched once and never stored") {
  World w;
  std::mt19937_64 rng(11);
  testing::populate_random(w, rng, 30, 0);
  auto dir = std::filesystem::temp_directory_path() / "bg_exec_literal";
  std::filesystem::create_directories(dir);
  std::string probe = testing::photo_payload(rng);
  std::ofstream(dir / "probe.jpg", std::ios::binary) << probe;
  ExecContext ctx = w.context();
  ctx.params["url"] = Value{"file://" + (dir / "probe.jpg").string()};
  std::uint64_t blobs_before = 0;
  w.graph.for_each_node([&](NodeId n) { blobs_before += w.graph.get_property(n, "photo") ? 1 : 0; });
  auto rs = w.run("MATCH (n) WHERE n.photo ~: Blob.fromURL($url) RETURN n", ctx);
  // One extraction per stored photo plus one for the probe.
  CHECK(w.extraction->extractor_calls() == blobs_before + 1);
  // Oracle: cosine of the stub vectors against the probe.
  std::size_t expected = 0;
  auto pv = std::get<std::vector<float>>(stubs::face_vector(probe, 16));
  w.graph.for_each_node([&](NodeId n) {
    auto p = w.graph.get_property(n, "photo");
    if (!p) return;
    auto v = std::get<std::vector<float>>(stubs::face_vector(w.blobs->read_all(std::get<BlobRef>(*p).id), 16));
    double dot = 0, a = 0, b = 0;
    for (int i = 0; i < 16; ++i) dot += pv[i] * v[i], a += pv[i] * pv[i], b += v[i] * v[i];
    if (std::max(0.0, dot / std::sqrt(a * b)) >= kDefaultSimilarityThreshold) ++expected;
  });
  CHECK(rs.rows.size() == expected);
  CHECK(expected > 0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("shortest path boundaries") {
  GraphStore g;
  NodeId a = g.create_node({}), x = g.create_node({}), b = g.create_node({}), far = g.create_node({});
  RelId r1 = g.create_rel(a, x, "t");
  RelId r2 = g.create_rel(b, x, "t");
  CHECK_FALSE(shortest_path(g, a, a, 1, 3));
  auto zero = shortest_path(g, a, a, 0, 3);
  REQUIRE(zero);
  CHECK(zero->nodes == std::vector<NodeId>{a});
  auto p = shortest_path(g, a, b, 1, 3);
  REQUIRE(p);
  CHECK(p->length() == 2);
  CHECK(p->nodes == std::vector<NodeId>{a, x, b});
  CHECK(p->rels == std::vector<RelId>{r1, r2});
  CHECK_FALSE(shortest_path(g, a, b, 1, 1));
  CHECK_FALSE(shortest_path(g, a, far, 1, 3));
  CHECK_FALSE(shortest_path(g, a, b, 1, 3, "other"));
  CHECK(code_of([&] { shortest_path(g, a, NodeId{99}, 1, 3); }) == ErrorCode::UnknownNode);
}

TEST_CASE("shortest path hop counts match Floyd-Warshall and ties pick the smallest ids") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 40; ++trial) {
    GraphStore g;
    int n = std::uniform_int_distribution<int>(2, 50)(rng);
    for (int i = 0; i < n; ++i) g.create_node({});
    int m = std::uniform_int_distribution<int>(0, 2 * n)(rng);
    std::uniform_int_distribution<int> pick(1, n);
    for (int i = 0; i < m; ++i) g.create_rel(NodeId(pick(rng)), NodeId(pick(rng)), "t");
    auto d = floyd_warshall(g, n);
    for (int i = 1; i <= n; ++i) {
      for (int j = 1; j <= n; ++j) {
        if (i == j) continue;
        auto p = shortest_path(g, NodeId(i), NodeId(j), 1, 3);
        if (d[i][j] < 1 || d[i][j] > 3) {
          CHECK_FALSE(p);
          continue;
        }
        REQUIRE(p);
        REQUIRE(p->length() == static_cast<std::size_t>(d[i][j]));
        CHECK(p->nodes.front() == NodeId(i));
        CHECK(p->nodes.back() == NodeId(j));
        for (std::size_t k = 0; k < p->rels.size(); ++k) CHECK(adjacent_via(g, p->nodes[k], p->rels[k], p->nodes[k + 1]));
        // Each step takes the smallest neighbour still at the right distance.
        for (std::size_t k = 0; k + 1 < p->nodes.size(); ++k) {
          int left = d[i][j] - static_cast<int>(k) - 1;
          std::uint64_t best = ~0ULL;
          for (const auto& adj : g.expand(p->nodes[k], Direction::Both))
            if (d[adj.node.value][j] == left) best = std::min(best, adj.node.value);
          CHECK(p->nodes[k + 1].value == best);
        }
      }
    }
  }
}

TEST_CASE("shortestPath in RETURN yields a path or null") {
  World w;
  load_example(w);
  auto rs = w.run(
      "MATCH (n:Person), (m:Team) WHERE n.name = 'Michael Jordan' RETURN m, shortestPath((n)-[*1..3]-(m))");
  REQUIRE(rs.rows.size() == 2);
  for (const auto& r : rs.rows) {
    auto team = std::get<NodeId>(r[0]);
    const auto& p = std::get<Path>(r[1]);
    CHECK(p.nodes.front() == NodeId{1});
    CHECK(p.nodes.back() == team);
    CHECK(p.length() == (team == NodeId{2} ? 1u : 3u));
  }
  auto none = w.run("MATCH (n:Pet), (m:Organization) RETURN shortestPath((n)-[:teamMate*1..3]-(m))");
  REQUIRE(none.rows.size() == 1);
  CHECK(is_null(none.rows[0][0]));
}

TEST_CASE("pushdown: an index probe scans nothing and agrees with the scan path") {
  GraphStore g;
  for (int i = 0; i < 50; ++i)
    g.create_node({"Person"}, {{"firstName", Value{std::string(i % 5 == 0 ? "x" : "y")}}});
  World w;
  w.graph = g;
  ExecContext ctx = w.context();
  auto pred = query::parse_query("MATCH (n) WHERE n.firstName = 'x' RETURN n").where;

  std::uint64_t before = w.graph.scanned_nodes();
  auto scanned = pushdown_filter(*pred, "n", {"Person"}, ctx);
  CHECK(w.graph.scanned_nodes() - before == 50);

  w.graph.create_index("Person", "firstName");
  before = w.graph.scanned_nodes();
  auto probed = pushdown_filter(*pred, "n", {"Person"}, ctx);
  CHECK(w.graph.scanned_nodes() == before);
  CHECK(probed == scanned);
  CHECK(probed.size() == 10);

  before = w.graph.scanned_nodes();
  auto rs = w.run("MATCH (n:Person) WHERE n.firstName = 'x' RETURN n");
  CHECK(rs.rows.size() == 10);
  CHECK(w.graph.scanned_nodes() == before);
}

TEST_CASE("pushdown: indexed and scanned results agree on random predicates") {
  std::mt19937_64 rng(2024);
  World plain, indexed;
  for (int i = 0; i < 1000; ++i) {
    std::vector<std::string> labels;
    if (rng() % 3) labels.push_back("L");
    if (rng() % 4 == 0) labels.push_back("M");
    Properties props;
    switch (rng() % 5) {
      case 0: break;
      case 1: props["k"] = Value{std::int64_t(rng() % 20)}; break;
      case 2: props["k"] = Value{static_cast<double>(rng() % 200) / 10.0}; break;
      case 3: props["k"] = Value{std::string(1, static_cast<char>('a' + rng() % 6))}; break;
      default: props["k"] = Value{(rng() & 1) == 1}; break;
    }
    plain.graph.create_node(labels, props);
    indexed.graph.create_node(labels, props);
  }
  indexed.graph.create_index("L", "k");
  const char* ops[] = {"=", "<", "<=", ">", ">="};
  for (int t = 0; t < 200; ++t) {
    std::string operand;
    switch (rng() % 4) {
      case 0: operand = std::to_string(rng() % 20); break;
      case 1: operand = std::to_string(rng() % 20) + ".5"; break;
      case 2: operand = "'" + std::string(1, static_cast<char>('a' + rng() % 6)) + "'"; break;
      default: operand = (rng() & 1) ? "true" : "false"; break;
    }
    std::string where = (rng() & 1) ? "n.k " + std::string(ops[rng() % 5]) + " " + operand
                                    : operand + " " + ops[rng() % 5] + " n.k";
    auto pred = query::parse_query("MATCH (n) WHERE " + where + " RETURN n").where;
    std::vector<std::string> labels = (rng() & 1) ? std::vector<std::string>{"L"} : std::vector<std::string>{"L", "M"};
    ExecContext a = plain.context(), b = indexed.context();
    auto before = indexed.graph.scanned_nodes();
    auto expected = pushdown_filter(*pred, "n", labels, a);
    auto got = pushdown_filter(*pred, "n", labels, b);
    CHECK_MESSAGE(got == expected, where);
    CHECK(indexed.graph.scanned_nodes() == before);
  }
}

TEST_CASE("results do not depend on the batch size") {
  std::mt19937_64 rng(9);
  World w;
  testing::populate_random(w, rng);
  for (int q = 0; q < 40; ++q) {
    std::string text = testing::random_query(rng);
    auto p = w.plan(text);
    std::vector<std::vector<std::string>> runs;
    for (std::size_t batch : {1, 3, 7, 1024}) {
      ExecContext ctx = w.context();
      ctx.options.batch_size = batch;
      auto rs = execute(*p, ctx);
      std::vector<std::string> seq;
      for (const auto& r : rs.rows) {
        std::string k;
        for (const auto& d : r) k += datum_key(d) + "|";
        seq.push_back(k);
      }
      runs.push_back(seq);
    }
    for (std::size_t i = 1; i < runs.size(); ++i) CHECK_MESSAGE(runs[i] == runs[0], text);
  }
}

TEST_CASE("greedy, exhaustive and naive plans return the same rows") {
  std::mt19937_64 rng(31337);
  int nonempty = 0;
  for (int g = 0; g < 4; ++g) {
    World w;
    testing::populate_random(w, rng);
    for (int q = 0; q < 25; ++q) {
      std::string text = testing::random_query(rng);
      auto greedy = testing::row_keys(w.run(text, Strategy::Greedy));
      auto best = testing::row_keys(w.run(text, Strategy::Exhaustive));
      auto naive = testing::row_keys(w.run(text, Strategy::Naive));
      CHECK_MESSAGE(greedy == best, text);
      CHECK_MESSAGE(greedy == naive, text);
      nonempty += greedy.empty() ? 0 : 1;
    }
  }
  CHECK(nonempty > 30);
}

TEST_CASE("an unstructured filter records its cost exactly once") {
  World w;
  ManualClock clock;
  w.extraction->register_extractor(Extractor{"slow", 1, SemanticKind::Categorical, 0, [&](std::string_view p) {
                                               clock.advance(0.25);
                                               return stubs::animal(p);
                                             }});
  for (int i = 0; i < 12; ++i)
    w.graph.create_node({"Pet"}, {{"photo", Value{BlobRef{w.blobs->put_blob(i % 3 ? "cat" : "dog", "image/png")}}}});
  ExecContext ctx = w.context();
  ctx.clock = &clock;
  ctx.options.batch_size = 5;
  std::string text = "MATCH (n:Pet) WHERE n.photo->slow = 'cat' RETURN n";
  auto p = w.plan(text);
  const auto* f = find_op(*p, plan::OpKind::UnstructuredFilter);
  REQUIRE(f);
  auto rs = execute(*p, ctx);
  CHECK(rs.rows.size() == 8);
  auto s = w.speeds.get(f->filter_id);
  REQUIRE(s);
  auto expected = plan::record_invocation(plan::FilterSpeedStats{f->filter_id, 0.0, 0, plan::kDefaultSensitivity},
                                          12 * 0.25, 12);
  CHECK(s->i == 1);
  CHECK(s->v == doctest::Approx(expected.v).epsilon(1e-12));
  CHECK(w.speeds.snapshot().size() == 1);
}

TEST_CASE("LIMIT 1 over a top-level unstructured filter extracts at most once") {
  World w;
  for (int i = 0; i < 40; ++i)
    w.graph.create_node({"Pet"}, {{"photo", Value{BlobRef{w.blobs->put_blob("a cat " + std::to_string(i), "image/png")}}}});
  std::string text = "MATCH (n:Pet) WHERE n.photo->animal = 'cat' RETURN n";
  auto p = w.plan(text);
  ExecContext ctx = w.context();
  ctx.options.limit = 1;
  auto rs = execute(*p, ctx);
  CHECK(rs.rows.size() == 1);
  CHECK(w.extraction->extractor_calls() <= 1);
  CHECK(w.speeds.snapshot().empty());  // not exhausted, nothing recorded

  auto warm = w.extraction->extractor_calls();
  auto again = execute(*p, ctx);
  CHECK(again.rows.size() == 1);
  CHECK(w.extraction->extractor_calls() == warm);
}

TEST_CASE("the structured work hook runs once per filtered row") {
  World w;
  for (int i = 0; i < 30; ++i) w.graph.create_node({"A"}, {{"x", Value{std::int64_t{i}}}});
  ExecContext ctx = w.context();
  int calls = 0;
  ctx.options.structured_row_work = [&] { ++calls; };
  auto rs = w.run("MATCH (n:A) WHERE n.x < 10 RETURN n", ctx);
  CHECK(rs.rows.size() == 10);
  CHECK(calls == 30);
}

TEST_CASE("CREATE, SET and DELETE") {
  World w;
  auto created = w.run(
      "CREATE (jordan:Person{name: 'Michael Jordan'})\n"
      "CREATE (scott:Person{name: 'Scott Pippen'})\n"
      "CREATE (jordan)-[:teamMate]->(scott);");
  CHECK(created.rows.empty());
  CHECK(w.graph.node_count() == 2);
  CHECK(w.graph.rel_count() == 1);
  auto rs = w.run("MATCH (jordan)-[:teamMate]->(n) WHERE jordan.name='Michael Jordan' RETURN n.name;");
  REQUIRE(rs.rows.size() == 1);
  CHECK(text_of(rs.rows[0][0]) == "Scott Pippen");

  w.run("MATCH (n:Person) WHERE n.name = 'Scott Pippen' SET n.number = 33, n:Player, n.photo = Blob.fromBytes('636174')");
  auto p = w.run("MATCH (n:Player) RETURN n.number, n.photo->animal, n.photo");
  REQUIRE(p.rows.size() == 1);
  CHECK(text_of(p.rows[0][0]) == "33");
  CHECK(render_datum(p.rows[0][1], *w.blobs) == "cat");
  CHECK(render_datum(p.rows[0][2], *w.blobs).rfind("blob:", 0) == 0);
  CHECK(render_datum(p.rows[0][2], *w.blobs).size() > 5);

  auto back = w.run("MATCH (n:Player) CREATE (n)<-[:coachOf]-(c:Coach{name: 'Phil'}) RETURN c.name");
  REQUIRE(back.rows.size() == 1);
  CHECK(text_of(back.rows[0][0]) == "Phil");
  CHECK(w.run("MATCH (c:Coach)-[:coachOf]->(n:Player) RETURN n").rows.size() == 1);

  CHECK(code_of([&] { w.run("MATCH (n:Coach) DELETE n"); }) == ErrorCode::EvaluationError);
  w.run("MATCH (n:Coach) DETACH DELETE n");
  CHECK(w.graph.node_count() == 2);
  w.run("MATCH (a)-[r:teamMate]->(b) DELETE r");
  CHECK(w.graph.rel_count() == 0);
}

TEST_CASE("TSV and JSON lines rendering") {
  World w;
  BlobId b = w.blobs->put_blob(std::string(100, 'x'), "image/png");
  w.graph.create_node({"P"}, {{"photo", Value{BlobRef{b}}}, {"note", Value{std::string("a\tb")}}});
  auto rs = w.run("MATCH (n:P) RETURN n, n.photo, n.note, n.missing");
  auto tsv = to_tsv(rs, *w.blobs);
  CHECK(tsv == "n\tn.photo\tn.note\tn.missing\nnode:1\tblob:" + std::to_string(b.value) + ":image/png:100\ta\\tb\t\n");
  auto json = to_json_lines(rs, *w.blobs);
  CHECK(json.find("\"n.missing\":null") != std::string::npos);
  CHECK(json.find("\"mime\":\"image/png\"") != std::string::npos);
}
