#include "blobgraph/index/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <random>

#include "blobgraph/common/error.hpp"
#include "blobgraph/index/vector_index.hpp"

namespace blobgraph {

namespace {

double micros_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

IndexBenchReport bench_index(const IndexBenchSpec& spec) {
  if (spec.vectors == 0 || spec.dim == 0 || spec.repeats == 0 || spec.ks.empty())
    raise(ErrorCode::InvalidConfig, "vectors, dim, repeats and ks must be positive");
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<float> n01;
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);

  std::vector<std::vector<float>> centres(spec.clusters, std::vector<float>(spec.dim));
  for (auto& c : centres)
    for (auto& x : c) x = n01(rng) * spec.spread;
  auto draw = [&](std::size_t i) {
    std::vector<float> v(spec.dim);
    if (centres.empty()) {
      for (auto& x : v) x = u(rng);
    } else {
      const auto& c = centres[i % centres.size()];
      for (std::size_t d = 0; d < v.size(); ++d) v[d] = c[d] + n01(rng);
    }
    return v;
  };

  SemanticSpace space("bench", 1, SemanticKind::Vector, spec.dim);
  for (std::size_t i = 0; i < spec.vectors; ++i) space.add(i, draw(i));
  BuildOptions bo;
  bo.seed = spec.seed;
  if (spec.buckets) bo.bucket_count = spec.buckets;
  auto index = VectorIndex::build(space, bo);

  IndexBenchReport report;
  report.buckets = index.bucket_count();
  report.nprobe = spec.nprobe == 0 ? index.bucket_count() : std::min(spec.nprobe, index.bucket_count());
  std::uniform_int_distribution<std::size_t> pick(0, std::max<std::size_t>(spec.clusters, 1) - 1);
  for (std::size_t k : spec.ks) {
    IndexBenchRow row;
    row.k = k;
    row.min_recall = 1.0;
    row.max_recall = 0.0;
    for (std::size_t q = 0; q < spec.repeats; ++q) {
      auto v = draw(pick(rng));
      auto t0 = std::chrono::steady_clock::now();
      auto approx = index.knn(v, k, report.nprobe);
      row.avg_index_us += micros_since(t0);
      t0 = std::chrono::steady_clock::now();
      auto exact = brute_knn(space, v, k);
      row.avg_brute_us += micros_since(t0);
      double r = recall(approx, exact);
      row.min_recall = std::min(row.min_recall, r);
      row.max_recall = std::max(row.max_recall, r);
      row.avg_recall += r;
    }
    row.avg_recall /= static_cast<double>(spec.repeats);
    row.avg_index_us /= static_cast<double>(spec.repeats);
    row.avg_brute_us /= static_cast<double>(spec.repeats);
    report.rows.push_back(row);
  }
  return report;
}

std::string format_bench_report(const IndexBenchReport& r) {
  std::string out = "buckets " + std::to_string(r.buckets) + ", nprobe " + std::to_string(r.nprobe) + "\n";
  out += "k\tmin_recall\tmax_recall\tavg_recall\tindex_us\tbrute_us\n";
  char buf[160];
  for (const auto& row : r.rows) {
    std::snprintf(buf, sizeof buf, "%zu\t%.3f\t%.3f\t%.4f\t%.1f\t%.1f\n", row.k, row.min_recall, row.max_recall,
                  row.avg_recall, row.avg_index_us, row.avg_brute_us);
    out += buf;
  }
  return out;
}

}  // namespace blobgraph
