#include "blobgraph/replication/write_log.hpp"

#include "blobgraph/common/bytes.hpp"
#include "blobgraph/common/error.hpp"
#include "blobgraph/common/file_util.hpp"
#include "blobgraph/common/hash.hpp"

namespace blobgraph {

std::uint64_t entry_checksum(std::uint64_t version, std::string_view statement) noexcept {
  return fnv1a64(statement, fnv1a64_u64(version));
}

WriteLogEntry make_entry(std::uint64_t version, std::string statement) {
  std::uint64_t c = entry_checksum(version, statement);
  return WriteLogEntry{version, std::move(statement), c};
}

std::string encode_log_record(const WriteLogEntry& e) {
  ByteWriter w;
  w.u64(e.version);
  w.str(e.statement);
  w.u64(e.checksum);
  return w.take();
}

std::vector<WriteLogEntry> decode_log_records(std::string_view bytes) {
  std::vector<WriteLogEntry> out;
  ByteReader r(bytes);
  while (!r.done()) {
    WriteLogEntry e;
    e.version = r.u64();
    e.statement = r.str();
    e.checksum = r.u64();
    if (!verify(e)) raise(ErrorCode::ChecksumMismatch, "write-log record " + std::to_string(e.version));
    out.push_back(std::move(e));
  }
  return out;
}

WriteLog::WriteLog(std::filesystem::path path) : path_(std::move(path)) {
  std::error_code ec;
  if (!std::filesystem::exists(*path_, ec)) return;
  for (auto& e : decode_log_records(read_file(*path_))) {
    if (e.version != last_version() + 1)
      raise(ErrorCode::CorruptFile, "write log skips from " + std::to_string(last_version()) + " to " +
                                        std::to_string(e.version));
    entries_.push_back(std::move(e));
  }
}

WriteLog WriteLog::adopt(std::vector<WriteLogEntry> entries) {
  WriteLog out;
  out.entries_ = std::move(entries);
  return out;
}

void WriteLog::persist(const WriteLogEntry& e) {
  if (path_) append_file_sync(*path_, encode_log_record(e));
}

const WriteLogEntry& WriteLog::append(std::string statement) {
  auto e = make_entry(last_version() + 1, std::move(statement));
  persist(e);
  entries_.push_back(std::move(e));
  return entries_.back();
}

void WriteLog::append_entry(const WriteLogEntry& e) {
  if (!verify(e)) raise(ErrorCode::ChecksumMismatch, "entry " + std::to_string(e.version));
  if (e.version != last_version() + 1)
    raise(ErrorCode::DivergentLog,
          "expected version " + std::to_string(last_version() + 1) + ", got " + std::to_string(e.version));
  persist(e);
  entries_.push_back(e);
}

const WriteLogEntry* WriteLog::at(std::uint64_t version) const {
  if (version == 0 || version > entries_.size()) return nullptr;
  return &entries_[version - 1];
}

std::vector<WriteLogEntry> WriteLog::range(std::uint64_t from, std::uint64_t to) const {
  to = std::min(to, last_version());
  if (from >= to) return {};
  return {entries_.begin() + static_cast<std::ptrdiff_t>(from), entries_.begin() + static_cast<std::ptrdiff_t>(to)};
}

WriteLog WriteLog::prefix(std::uint64_t version) const {
  WriteLog out;
  out.entries_ = range(0, version);
  return out;
}

bool WriteLog::gapless() const {
  for (std::size_t i = 0; i < entries_.size(); ++i)
    if (entries_[i].version != i + 1 || !verify(entries_[i])) return false;
  return true;
}

}  // namespace blobgraph
