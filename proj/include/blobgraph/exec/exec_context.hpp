#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>

#include "blobgraph/blob/blob_store.hpp"
#include "blobgraph/common/clock.hpp"
#include "blobgraph/extraction/extraction_service.hpp"
#include "blobgraph/graph/graph_store.hpp"
#include "blobgraph/planner/cost_model.hpp"

namespace blobgraph {

// Fetches http(s) sources for Blob.fromURL. Returns nullopt when unreachable.
using UrlFetcher = std::function<std::optional<std::string>(const std::string& url)>;

struct ExecOptions {
  std::size_t batch_size = 1024;
  // Rows the caller wants; the root stops pulling once it has them.
  std::optional<std::uint64_t> limit;
  // Wall-clock budget per query, checked between batches.
  std::optional<double> timeout_secs;
  // Called once per row a structured filter evaluates. Tests use it to
  // simulate expensive structured work on a manual clock.
  std::function<void()> structured_row_work;
};

struct ExecContext {
  GraphStore* graph = nullptr;
  BlobStore* blobs = nullptr;
  ExtractionService* extraction = nullptr;  // null: unstructured predicates raise NoExtractor
  plan::SpeedStatsRegistry* speeds = nullptr;  // null: no cost feedback
  std::map<std::string, Value> params;
  const Clock* clock = nullptr;  // null: a SteadyClock
  UrlFetcher fetcher;
  ExecOptions options;

  const Clock& time() const;
};

}  // namespace blobgraph
