#pragma once

// Recall / latency benchmark for the vector index against brute force.
// Each k is measured over `repeats` fresh queries.

#include <cstdint>
#include <string>
#include <vector>

namespace blobgraph {

struct IndexBenchSpec {
  std::size_t vectors = 10000;
  std::uint32_t dim = 64;
  std::size_t clusters = 0;  // 0: uniform in [-1, 1)^dim; else Gaussian clusters
  float spread = 3.0f;       // cluster centre scale, unit-variance clusters
  std::size_t buckets = 0;   // 0: the default bucket rule
  std::size_t nprobe = 1;    // 0: every bucket
  std::vector<std::size_t> ks{1, 10, 100, 500};
  std::size_t repeats = 500;
  std::uint64_t seed = 1;
};

struct IndexBenchRow {
  std::size_t k = 0;
  double min_recall = 0, max_recall = 0, avg_recall = 0;
  double avg_index_us = 0, avg_brute_us = 0;
};

struct IndexBenchReport {
  std::size_t buckets = 0;
  std::size_t nprobe = 0;
  std::vector<IndexBenchRow> rows;
};

IndexBenchReport bench_index(const IndexBenchSpec& spec);
std::string format_bench_report(const IndexBenchReport& r);

}  // namespace blobgraph
