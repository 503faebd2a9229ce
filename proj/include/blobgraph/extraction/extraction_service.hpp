#pragma once

// Sub-property extraction with a serial-validated cache.
//
// A cache entry is keyed by (blob id, sub-property key, model serial) and is
// valid only while its serial is the latest registered for that key. Bumping
// the serial is O(1): older entries are dropped lazily when next looked up.
// Concurrent misses on one key share a single extractor call.

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "blobgraph/blob/blob_store.hpp"
#include "blobgraph/common/thread_pool.hpp"
#include "blobgraph/extraction/aipm.hpp"
#include "blobgraph/extraction/comparator.hpp"
#include "blobgraph/extraction/semantic_value.hpp"

namespace blobgraph {

struct Extractor {
  std::string sub_key;
  std::uint32_t serial = 1;
  SemanticKind kind = SemanticKind::Vector;
  std::uint32_t dim = 0;  // vectors only
  // Runs on the model host. May be empty when the model is served remotely.
  ModelFn fn;
};

struct CacheKey {
  BlobId blob;
  std::string sub_key;
  std::uint32_t serial = 0;
  friend auto operator<=>(const CacheKey&, const CacheKey&) = default;
};

struct SpaceInfo {
  SemanticKind kind;
  std::uint32_t dim;
  std::uint32_t serial;
};

struct ExtractionOptions {
  std::size_t max_in_flight = 8;
  double timeout_secs = kDefaultAipmTimeoutSecs;
  // Sub-property used when two BLOBs are compared directly (photo ~: photo).
  std::string default_sub_key = "face";
};

std::string model_id_for(const std::string& sub_key, std::uint32_t serial);

class ExtractionService {
 public:
  // Models run in-process behind an InProcessTransport.
  explicit ExtractionService(const BlobStore& blobs, ExtractionOptions opts = {});
  // Models are reached through `client` (e.g. a TcpTransport).
  ExtractionService(const BlobStore& blobs, std::unique_ptr<AipmClient> client,
                    ExtractionOptions opts = {});
  ~ExtractionService();

  ExtractionService(const ExtractionService&) = delete;
  ExtractionService& operator=(const ExtractionService&) = delete;

  // DuplicateSerial if (sub_key, serial) is already registered.
  void register_extractor(Extractor e);
  std::optional<std::uint32_t> latest_serial(const std::string& sub_key) const;
  // NoExtractor if the key is unknown.
  SpaceInfo space(const std::string& sub_key) const;
  bool has_sub_key(const std::string& sub_key) const;
  std::vector<std::string> sub_keys() const;

  SemanticValue extract(BlobId blob, const std::string& sub_key);
  // Cache hits complete immediately; misses run on the service's worker pool,
  // at most max_in_flight at a time.
  std::shared_future<SemanticValue> extract_async(BlobId blob, const std::string& sub_key);
  // Uncached extraction of transient bytes (literal BLOBs in read queries).
  SemanticValue extract_bytes(std::string payload, const std::string& sub_key);
  std::optional<SemanticValue> peek(BlobId blob, const std::string& sub_key) const;

  // Round-trips issued to extractors (cache misses plus uncached calls).
  std::uint64_t extractor_calls() const noexcept { return calls_.load(); }
  std::uint64_t cache_hits() const noexcept { return hits_.load(); }
  std::size_t cache_size() const;
  void clear_cache();

  void save_cache(const std::filesystem::path& path) const;
  void load_cache(const std::filesystem::path& path);

  ComparatorRegistry& comparators() noexcept { return comparators_; }
  const ComparatorRegistry& comparators() const noexcept { return comparators_; }
  const ExtractionOptions& options() const noexcept { return opts_; }
  void set_default_sub_key(std::string key) { opts_.default_sub_key = std::move(key); }
  // Null when models are remote.
  const ModelHost* host() const noexcept { return host_.get(); }

 private:
  struct Declared {
    SemanticKind kind;
    std::uint32_t dim;
  };

  std::uint32_t require_latest(const std::string& sub_key) const;
  SemanticValue call_model(const std::string& sub_key, std::uint32_t serial, std::string payload);
  // Looks up or claims a cache slot. Returns the shared result and whether the
  // caller must compute it.
  std::pair<std::shared_future<SemanticValue>, std::shared_ptr<std::promise<SemanticValue>>>
  claim(const CacheKey& key);
  void compute(const CacheKey& key, const std::shared_ptr<std::promise<SemanticValue>>& promise);

  const BlobStore& blobs_;
  ExtractionOptions opts_;
  std::shared_ptr<ModelHost> host_;
  std::unique_ptr<AipmClient> client_;
  ComparatorRegistry comparators_;

  mutable std::shared_mutex reg_mu_;
  std::map<std::string, std::map<std::uint32_t, Declared>> registry_;

  mutable std::mutex cache_mu_;
  std::map<CacheKey, SemanticValue> cache_;
  std::map<CacheKey, std::shared_future<SemanticValue>> in_flight_;

  std::atomic<std::uint64_t> calls_{0};
  std::atomic<std::uint64_t> hits_{0};
  std::unique_ptr<ThreadPool> pool_;
};

}  // namespace blobgraph
