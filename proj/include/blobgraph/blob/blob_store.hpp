#pragma once

// BLOB storage.
//
// Small payloads (length < inline_threshold) stay inline and are persisted by
// the graph snapshot. Larger payloads go to an external chunk store addressed
// by (row_key, column_key) = locate(id, num_columns): all blobs sharing a
// row_key live in one chunk file, written as a sequence of bounded-size chunk
// records. Reads go through a BlobHandle that fetches one chunk at a time.
//
// Files in directory mode:
//   blobs.hdr         mime table, rewritten atomically
//   blobs.meta        append-only 24-byte meta records
//   row_<k>.pblb      "PBLB" | version u16 | [u32 chunk_len | payload]*

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "blobgraph/common/ids.hpp"

namespace blobgraph {

struct BlobStoreOptions {
  std::uint64_t inline_threshold = 10 * 1024;
  std::uint64_t chunk_size = 64 * 1024;
  std::uint64_t num_columns = 1024;
};

struct BlobMeta {
  BlobId id;
  std::uint64_t length = 0;
  std::string mime;
  bool external = false;
  friend bool operator==(const BlobMeta&, const BlobMeta&) = default;
};

enum class Placement : std::uint8_t { Inline, External };

inline Placement placement_for(std::uint64_t length, std::uint64_t inline_threshold) noexcept {
  return length < inline_threshold ? Placement::Inline : Placement::External;
}

struct BlobLocation {
  std::uint64_t row_key;
  std::uint64_t column_key;
  friend bool operator==(const BlobLocation&, const BlobLocation&) = default;
};

// row_key = id / num_columns, column_key = id % num_columns.
BlobLocation locate(BlobId id, std::uint64_t num_columns);

// Fixed 24-byte meta record: length u64 | id u64 | mime-code u32 | flags u32.
inline constexpr std::size_t kMetaRecordSize = 24;
inline constexpr std::uint32_t kMetaFlagExternal = 1;

struct MetaRecord {
  std::uint64_t length = 0;
  std::uint64_t id = 0;
  std::uint32_t mime_code = 0;
  std::uint32_t flags = 0;
  friend bool operator==(const MetaRecord&, const MetaRecord&) = default;
};

std::string encode_meta_record(const MetaRecord& m);
MetaRecord decode_meta_record(std::string_view bytes);

class BlobStore;

// Streaming reader over one blob. Not thread-safe; use one handle per thread.
class BlobHandle {
 public:
  BlobId id() const noexcept { return meta_.id; }
  const BlobMeta& meta() const noexcept { return meta_; }
  std::uint64_t cursor() const noexcept { return cursor_; }

  // Exactly [offset, offset+len). RangeOutOfBounds if it runs past the end.
  std::string read_range(std::uint64_t offset, std::uint64_t len);
  // Sequential read from the cursor; returns fewer bytes at the end.
  std::string read(std::uint64_t len);
  void seek(std::uint64_t offset);

  // Bytes this handle fetched from the backing store (chunk-granular).
  std::uint64_t bytes_read_counter() const noexcept { return fetched_; }

 private:
  friend class BlobStore;
  BlobHandle(const BlobStore* store, BlobMeta meta) : store_(store), meta_(std::move(meta)) {}

  const BlobStore* store_;
  BlobMeta meta_;
  std::uint64_t cursor_ = 0;
  std::uint64_t fetched_ = 0;
  std::optional<std::size_t> cached_chunk_;
  std::string chunk_;
};

class BlobStore {
 public:
  // Memory-backed store; external chunk "files" are byte strings.
  explicit BlobStore(BlobStoreOptions opts = {});
  // Directory-backed store; creates the directory layout if missing.
  BlobStore(const std::filesystem::path& dir, BlobStoreOptions opts);
  ~BlobStore();

  BlobStore(const BlobStore&) = delete;
  BlobStore& operator=(const BlobStore&) = delete;

  BlobId put_blob(std::istream& payload, std::string_view mime);
  BlobId put_blob(std::string_view payload, std::string_view mime);

  bool contains(BlobId id) const;
  BlobMeta blob_meta(BlobId id) const;
  BlobHandle open_blob(BlobId id) const;
  // Full streaming read through a handle.
  std::string read_all(BlobId id) const;
  // Baseline reader that pulls the whole payload from the backing store in one
  // request, regardless of how much the caller needs.
  std::string load_whole(BlobId id) const;

  std::vector<BlobMeta> all_meta() const;
  std::uint64_t blob_count() const;
  BlobId next_id() const;

  // Inline payloads are persisted by the graph snapshot, not here.
  std::map<std::uint64_t, std::string> inline_payloads() const;
  void restore_inline_payloads(std::map<std::uint64_t, std::string> payloads);

  // Total bytes fetched from the backing store by all readers.
  std::uint64_t payload_bytes_fetched() const noexcept { return fetched_.load(); }
  const BlobStoreOptions& options() const noexcept { return opts_; }

 private:
  friend class BlobHandle;
  struct Chunk {
    std::uint64_t file_offset;  // offset of the payload (after the u32 length)
    std::uint64_t length;
  };
  struct Entry {
    BlobMeta meta;
    std::vector<Chunk> chunks;           // external only
    std::vector<std::uint64_t> starts;   // blob offset of each chunk
  };
  class Backend;
  class MemoryBackend;
  class FileBackend;

  std::uint32_t mime_code(std::string_view mime);
  void persist_header();
  void load_existing();
  const Entry& entry(BlobId id) const;
  std::string fetch_chunk(const Entry& e, std::size_t chunk) const;

  BlobStoreOptions opts_;
  std::optional<std::filesystem::path> dir_;
  std::unique_ptr<Backend> backend_;
  mutable std::shared_mutex mu_;
  std::vector<std::string> mimes_;
  std::map<std::uint64_t, Entry> entries_;
  std::map<std::uint64_t, std::string> inline_;
  std::uint64_t next_id_ = 1;
  mutable std::atomic<std::uint64_t> fetched_{0};
};

}  // namespace blobgraph
