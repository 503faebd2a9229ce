#pragma once

// Embedded database: graph, blob store, extraction service and speed
// statistics behind one single-writer / multi-reader lock.
//
// Directory layout:
//   graph.snap         graph snapshot with inline blob payloads
//   blobs/             external blob store
//   indexes            one "label<TAB>key" line per property index
//   extraction.cache   extracted sub-property values
//   speeds             unstructured filter speed statistics

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>

#include "blobgraph/exec/executor.hpp"
#include "blobgraph/exec/result_format.hpp"
#include "blobgraph/extraction/extraction_service.hpp"
#include "blobgraph/planner/optimizer.hpp"

namespace blobgraph {

struct DatabaseOptions {
  std::optional<std::filesystem::path> data_dir;  // none: in memory
  BlobStoreOptions blob;
  ExtractionOptions extraction;
  double ema_k = plan::kDefaultSensitivity;
  std::optional<double> similarity_threshold;    // default for every space
  std::map<std::string, double> space_thresholds;  // per sub-property key
  bool stub_extractors = true;
  // Directory mode: persist after every write statement.
  bool checkpoint_on_write = true;
  ExecOptions exec;
  const Clock* clock = nullptr;
  UrlFetcher fetcher;
  plan::CostModel cost;
  plan::CardinalityModel card;
};

enum class QueryKind { Read, Write };
const char* query_kind_name(QueryKind k) noexcept;

// Write iff the statement has CREATE, SET or DELETE. ParseError otherwise
// propagated.
QueryKind classify(std::string_view text);

class Database {
 public:
  explicit Database(DatabaseOptions opts = {});
  ~Database();

  Database(const Database&) = delete;
  Database& operator=(const Database&) = delete;

  ResultSet run(std::string_view text, const std::map<std::string, Value>& params = {});
  ResultSet run(std::string_view text, const std::map<std::string, Value>& params, const ExecOptions& exec);

  plan::PlanPtr plan(std::string_view text) const;
  std::string explain(std::string_view text) const;
  std::string render(const ResultSet& rs, ResultFormat format) const;

  void create_index(const std::string& label, const std::string& key);
  // Persists the whole state (directory mode; a no-op in memory).
  void checkpoint();
  std::uint64_t digest() const;
  GraphStats stats() const;

  // Direct store access under the exclusive / shared lock, for bulk loading
  // and inspection.
  void write(const std::function<void(GraphStore&, BlobStore&)>& fn);
  void read(const std::function<void(const GraphStore&, const BlobStore&)>& fn) const;

  ExtractionService& extraction() noexcept { return *extraction_; }
  plan::SpeedStatsRegistry& speeds() noexcept { return speeds_; }
  const DatabaseOptions& options() const noexcept { return opts_; }

  // Statements executed by run(), reads and writes.
  std::uint64_t statements_run() const noexcept { return statements_.load(); }

 private:
  plan::PlanningContext planning_context() const;
  ExecContext exec_context(const std::map<std::string, Value>& params, const ExecOptions& exec);
  void load_state();
  void save_state();

  DatabaseOptions opts_;
  mutable std::shared_mutex mu_;
  GraphStore graph_;
  std::unique_ptr<BlobStore> blobs_;
  std::unique_ptr<ExtractionService> extraction_;
  plan::SpeedStatsRegistry speeds_;
  std::atomic<std::uint64_t> statements_{0};
};

}  // namespace blobgraph
