#pragma once

// An in-memory store with the default stub extractors, plus helpers that plan
// and run query text against it.

#include <algorithm>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "blobgraph/blob/blob_store.hpp"
#include "blobgraph/exec/executor.hpp"
#include "blobgraph/extraction/extraction_service.hpp"
#include "blobgraph/extraction/stub_extractors.hpp"
#include "blobgraph/planner/optimizer.hpp"
#include "blobgraph/query/parser.hpp"

namespace blobgraph::testing {

enum class Strategy { Greedy, Exhaustive, Naive };

struct World {
  GraphStore graph;
  std::unique_ptr<BlobStore> blobs = std::make_unique<BlobStore>();
  std::unique_ptr<ExtractionService> extraction;
  plan::SpeedStatsRegistry speeds;

  World() : extraction(std::make_unique<ExtractionService>(*blobs)) { stubs::register_default_stubs(*extraction); }

  ExecContext context() {
    ExecContext c;
    c.graph = &graph;
    c.blobs = blobs.get();
    c.extraction = extraction.get();
    c.speeds = &speeds;
    return c;
  }

  plan::PlanningContext planning() const {
    plan::PlanningContext p;
    p.stats = graph.stats();
    p.speeds = speeds.snapshot();
    for (const auto& d : graph.index_definitions()) p.indexes.insert(d);
    return p;
  }

  plan::PlanPtr plan(const std::string& text, Strategy s = Strategy::Greedy) const {
    plan::Planner planner(query::to_query_graph(query::parse_query(text)), planning());
    switch (s) {
      case Strategy::Greedy: return planner.optimize().plan;
      case Strategy::Exhaustive: return planner.exhaustive().plan;
      case Strategy::Naive: return planner.naive();
    }
    return nullptr;
  }

  ResultSet run(const std::string& text, Strategy s = Strategy::Greedy) {
    auto ctx = context();
    return run(text, ctx, s);
  }

  ResultSet run(const std::string& text, ExecContext& ctx, Strategy s = Strategy::Greedy) {
    auto ast = query::parse_query(text);
    plan::Planner planner(query::to_query_graph(ast), planning());
    plan::PlanPtr p = s == Strategy::Greedy       ? planner.optimize().plan
                      : s == Strategy::Exhaustive ? planner.exhaustive().plan
                                                  : planner.naive();
    return execute_statement(ast, *p, ctx);
  }
};

// Photo payload: a face prototype (one of five) with small noise, followed by
// an animal word.
inline std::string photo_payload(std::mt19937_64& rng) {
  static const char* animals[] = {"cat", "dog", "bird"};
  int proto = std::uniform_int_distribution<int>(0, 4)(rng);
  std::string s(16, '\0');
  for (int i = 0; i < 16; ++i) {
    int base = ((proto * 7 + i * 13) % 11) * 23;
    int noise = std::uniform_int_distribution<int>(-6, 6)(rng);
    s[i] = static_cast<char>(std::clamp(base + noise, 0, 255));
  }
  s += " animal:";
  s += animals[std::uniform_int_distribution<int>(0, 2)(rng)];
  return s;
}

// Labels A and B (a node may have none or both), x in 0..9, name n0..n4 and a
// photo, each property present with probability 0.8; relationship types r
// and s, self loops included.
inline void populate_random(World& w, std::mt19937_64& rng, int nodes = 100, int rels = 250) {
  auto coin = [&](double p) { return std::bernoulli_distribution(p)(rng); };
  std::vector<NodeId> ids;
  for (int i = 0; i < nodes; ++i) {
    std::vector<std::string> labels;
    if (coin(0.5)) labels.push_back("A");
    if (coin(0.4)) labels.push_back("B");
    Properties props;
    if (coin(0.8)) props["x"] = Value{std::int64_t{std::uniform_int_distribution<int>(0, 9)(rng)}};
    if (coin(0.8)) props["name"] = Value{"n" + std::to_string(std::uniform_int_distribution<int>(0, 4)(rng))};
    if (coin(0.8)) props["photo"] = Value{BlobRef{w.blobs->put_blob(photo_payload(rng), "image/jpeg")}};
    ids.push_back(w.graph.create_node(labels, props));
  }
  std::uniform_int_distribution<int> pick(0, nodes - 1);
  for (int i = 0; i < rels; ++i) w.graph.create_rel(ids[pick(rng)], ids[pick(rng)], coin(0.5) ? "r" : "s");
}

// Row multiset in canonical form.
inline std::vector<std::string> row_keys(const ResultSet& rs) {
  std::vector<std::string> out;
  for (const auto& row : rs.rows) {
    std::string k;
    for (const auto& d : row) k += datum_key(d) + "|";
    out.push_back(std::move(k));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace blobgraph::testing
