#pragma once

// Random write statements over a small key space. Keys are reused, so updates,
// relationship creation and deletes hit existing nodes.

#include <random>
#include <string>

namespace blobgraph {

inline std::string random_write(std::mt19937_64& rng, int keys = 50) {
  auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
  int k = pick(keys), j = pick(keys), v = pick(1000);
  switch (pick(10)) {
    case 0:
    case 1:
    case 2:
    case 3: return "CREATE (:P {k: " + std::to_string(k) + ", v: " + std::to_string(v) + "})";
    case 4:
    case 5: return "MATCH (n:P) WHERE n.k = " + std::to_string(k) + " SET n.v = " + std::to_string(v);
    case 6: return "MATCH (n:P) WHERE n.k = " + std::to_string(k) + " SET n:Q";
    case 7:
    case 8:
      return "MATCH (a:P), (b:P) WHERE a.k = " + std::to_string(k) + " AND b.k = " + std::to_string(j) +
             " CREATE (a)-[:r {w: " + std::to_string(v) + "}]->(b)";
    default: return "MATCH (n:P) WHERE n.k = " + std::to_string(k) + " DETACH DELETE n";
  }
}

}  // namespace blobgraph
