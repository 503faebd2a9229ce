#pragma once

// Version-numbered log of write statements.
//
// File format: a sequence of little-endian records
//   u64 version | u32 stmt_len | stmt bytes | u64 checksum

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace blobgraph {

struct WriteLogEntry {
  std::uint64_t version = 0;
  std::string statement;
  std::uint64_t checksum = 0;
  friend bool operator==(const WriteLogEntry&, const WriteLogEntry&) = default;
};

std::uint64_t entry_checksum(std::uint64_t version, std::string_view statement) noexcept;
WriteLogEntry make_entry(std::uint64_t version, std::string statement);
inline bool verify(const WriteLogEntry& e) noexcept { return e.checksum == entry_checksum(e.version, e.statement); }

std::string encode_log_record(const WriteLogEntry& e);
// CorruptFile on a truncated record, ChecksumMismatch on a bad checksum.
std::vector<WriteLogEntry> decode_log_records(std::string_view bytes);

class WriteLog {
 public:
  WriteLog() = default;
  // File-backed: existing records are loaded, appends are fsynced.
  explicit WriteLog(std::filesystem::path path);
  // Keeps the entries as given, unchecked; gapless() reports their state.
  static WriteLog adopt(std::vector<WriteLogEntry> entries);

  // Appends the next version.
  const WriteLogEntry& append(std::string statement);
  // Appends a received entry. DivergentLog unless it is the next version;
  // ChecksumMismatch if it does not verify.
  void append_entry(const WriteLogEntry& e);

  std::uint64_t last_version() const noexcept { return entries_.empty() ? 0 : entries_.back().version; }
  const std::vector<WriteLogEntry>& entries() const noexcept { return entries_; }
  const WriteLogEntry* at(std::uint64_t version) const;
  // Entries with from < version <= to (to capped at the last version).
  std::vector<WriteLogEntry> range(std::uint64_t from, std::uint64_t to) const;
  // Keeps versions 1..version.
  WriteLog prefix(std::uint64_t version) const;
  // Versions are exactly 1..last_version and every checksum verifies.
  bool gapless() const;

 private:
  void persist(const WriteLogEntry& e);

  std::optional<std::filesystem::path> path_;
  std::vector<WriteLogEntry> entries_;
};

}  // namespace blobgraph
