#include "blobgraph/blob/blob_store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <sstream>

#include "blobgraph/common/bytes.hpp"
#include "blobgraph/common/error.hpp"
#include "blobgraph/common/file_util.hpp"

namespace blobgraph {

namespace {

constexpr std::string_view kChunkMagic = "PBLB";
constexpr std::uint16_t kChunkVersion = 1;
constexpr std::size_t kChunkHeader = 6;
constexpr std::string_view kHeaderMagic = "PBHD";

std::string chunk_file_header() {
  ByteWriter w;
  w.raw(kChunkMagic);
  w.u16(kChunkVersion);
  return w.take();
}

[[noreturn]] void io_fail(const std::string& what) {
  raise(ErrorCode::IoError, what + ": " + std::strerror(errno));
}

}  // namespace

BlobLocation locate(BlobId id, std::uint64_t num_columns) {
  if (num_columns == 0) raise(ErrorCode::InvalidConfig, "num_columns must be at least 1");
  return {id.value / num_columns, id.value % num_columns};
}

std::string encode_meta_record(const MetaRecord& m) {
  ByteWriter w;
  w.u64(m.length);
  w.u64(m.id);
  w.u32(m.mime_code);
  w.u32(m.flags);
  return w.take();
}

MetaRecord decode_meta_record(std::string_view bytes) {
  if (bytes.size() != kMetaRecordSize) raise(ErrorCode::CorruptFile, "meta record size");
  ByteReader r(bytes);
  MetaRecord m;
  m.length = r.u64();
  m.id = r.u64();
  m.mime_code = r.u32();
  m.flags = r.u32();
  return m;
}

// ---------------------------------------------------------------------------
// backends

class BlobStore::Backend {
 public:
  virtual ~Backend() = default;
  // Appends one chunk record to the row file; returns the payload offset.
  virtual std::uint64_t append(std::uint64_t row, std::string_view payload) = 0;
  virtual void sync(std::uint64_t row) = 0;
  virtual std::string read(std::uint64_t row, std::uint64_t offset, std::uint64_t len) const = 0;
  virtual std::vector<Chunk> records(std::uint64_t row) const = 0;
};

namespace {

std::vector<std::pair<std::uint64_t, std::uint64_t>> parse_records(std::string_view file) {
  if (file.size() < kChunkHeader || file.substr(0, 4) != kChunkMagic) {
    raise(ErrorCode::CorruptFile, "bad chunk file header");
  }
  ByteReader r(file);
  r.raw(4);
  if (r.u16() != kChunkVersion) raise(ErrorCode::CorruptFile, "unsupported chunk file version");
  std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
  while (!r.done()) {
    std::uint32_t len = r.u32();
    std::uint64_t off = r.position();
    r.raw(len);
    out.emplace_back(off, len);
  }
  return out;
}

}  // namespace

class BlobStore::MemoryBackend final : public Backend {
 public:
  std::uint64_t append(std::uint64_t row, std::string_view payload) override {
    auto& f = rows_[row];
    if (f.empty()) f = chunk_file_header();
    ByteWriter w;
    w.u32(static_cast<std::uint32_t>(payload.size()));
    f += w.data();
    std::uint64_t off = f.size();
    f += payload;
    return off;
  }
  void sync(std::uint64_t) override {}
  std::string read(std::uint64_t row, std::uint64_t offset, std::uint64_t len) const override {
    auto it = rows_.find(row);
    if (it == rows_.end() || offset + len > it->second.size()) {
      raise(ErrorCode::CorruptFile, "chunk outside row file");
    }
    return it->second.substr(offset, len);
  }
  std::vector<Chunk> records(std::uint64_t row) const override {
    std::vector<Chunk> out;
    auto it = rows_.find(row);
    if (it == rows_.end()) return out;
    for (auto [off, len] : parse_records(it->second)) out.push_back({off, len});
    return out;
  }

 private:
  std::map<std::uint64_t, std::string> rows_;
};

class BlobStore::FileBackend final : public Backend {
 public:
  explicit FileBackend(std::filesystem::path dir) : dir_(std::move(dir)) {}
  ~FileBackend() override {
    for (auto& [row, fd] : fds_) ::close(fd);
  }

  std::uint64_t append(std::uint64_t row, std::string_view payload) override {
    int fd = open_row(row, true);
    off_t end = ::lseek(fd, 0, SEEK_END);
    if (end < 0) io_fail("seek " + path(row).string());
    std::string rec;
    if (end == 0) rec = chunk_file_header();
    ByteWriter w;
    w.u32(static_cast<std::uint32_t>(payload.size()));
    rec += w.data();
    std::uint64_t off = static_cast<std::uint64_t>(end) + rec.size();
    rec += payload;
    write_all(fd, rec, static_cast<std::uint64_t>(end));
    return off;
  }

  void sync(std::uint64_t row) override {
    if (::fsync(open_row(row, true)) != 0) io_fail("fsync " + path(row).string());
  }

  std::string read(std::uint64_t row, std::uint64_t offset, std::uint64_t len) const override {
    int fd = const_cast<FileBackend*>(this)->open_row(row, false);
    std::string out(len, '\0');
    std::uint64_t done = 0;
    while (done < len) {
      ssize_t n = ::pread(fd, out.data() + done, len - done, static_cast<off_t>(offset + done));
      if (n < 0) {
        if (errno == EINTR) continue;
        io_fail("read " + path(row).string());
      }
      if (n == 0) raise(ErrorCode::CorruptFile, "chunk outside row file " + path(row).string());
      done += static_cast<std::uint64_t>(n);
    }
    return out;
  }

  std::vector<Chunk> records(std::uint64_t row) const override {
    std::vector<Chunk> out;
    if (!std::filesystem::exists(path(row))) return out;
    for (auto [off, len] : parse_records(read_file(path(row)))) out.push_back({off, len});
    return out;
  }

 private:
  std::filesystem::path path(std::uint64_t row) const {
    return dir_ / ("row_" + std::to_string(row) + ".pblb");
  }

  int open_row(std::uint64_t row, bool create) {
    std::lock_guard lk(fd_mu_);
    if (auto it = fds_.find(row); it != fds_.end()) return it->second;
    int flags = O_RDWR | O_CLOEXEC | (create ? O_CREAT : 0);
    int fd = ::open(path(row).c_str(), flags, 0644);
    if (fd < 0) io_fail("open " + path(row).string());
    fds_[row] = fd;
    return fd;
  }

  static void write_all(int fd, std::string_view data, std::uint64_t at) {
    std::uint64_t done = 0;
    while (done < data.size()) {
      ssize_t n = ::pwrite(fd, data.data() + done, data.size() - done,
                           static_cast<off_t>(at + done));
      if (n < 0) {
        if (errno == EINTR) continue;
        io_fail("write chunk");
      }
      done += static_cast<std::uint64_t>(n);
    }
  }

  std::filesystem::path dir_;
  std::mutex fd_mu_;
  std::map<std::uint64_t, int> fds_;
};

// ---------------------------------------------------------------------------
// store

BlobStore::BlobStore(BlobStoreOptions opts)
    : opts_(opts), backend_(std::make_unique<MemoryBackend>()) {
  if (opts_.num_columns == 0 || opts_.chunk_size == 0 || opts_.inline_threshold == 0) {
    raise(ErrorCode::InvalidConfig, "blob store options must be positive");
  }
}

BlobStore::BlobStore(const std::filesystem::path& dir, BlobStoreOptions opts)
    : opts_(opts), dir_(dir) {
  if (opts_.num_columns == 0 || opts_.chunk_size == 0 || opts_.inline_threshold == 0) {
    raise(ErrorCode::InvalidConfig, "blob store options must be positive");
  }
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) raise(ErrorCode::IoError, "create " + dir.string() + ": " + ec.message());
  backend_ = std::make_unique<FileBackend>(dir);
  load_existing();
}

BlobStore::~BlobStore() = default;

std::uint32_t BlobStore::mime_code(std::string_view mime) {
  for (std::size_t i = 0; i < mimes_.size(); ++i) {
    if (mimes_[i] == mime) return static_cast<std::uint32_t>(i);
  }
  mimes_.emplace_back(mime);
  persist_header();
  return static_cast<std::uint32_t>(mimes_.size() - 1);
}

void BlobStore::persist_header() {
  if (!dir_) return;
  ByteWriter w;
  w.raw(kHeaderMagic);
  w.u16(1);
  w.u32(static_cast<std::uint32_t>(mimes_.size()));
  for (const auto& m : mimes_) w.str(m);
  write_file_atomic(*dir_ / "blobs.hdr", w.data());
}

void BlobStore::load_existing() {
  auto hdr = *dir_ / "blobs.hdr";
  if (std::filesystem::exists(hdr)) {
    std::string bytes = read_file(hdr);
    ByteReader r(bytes);
    if (r.remaining() < 6 || r.raw(4) != kHeaderMagic || r.u16() != 1) {
      raise(ErrorCode::CorruptFile, "bad blob store header");
    }
    for (std::uint32_t n = r.u32(); n > 0; --n) mimes_.push_back(r.str());
  }
  auto meta = *dir_ / "blobs.meta";
  if (!std::filesystem::exists(meta)) return;
  std::string bytes = read_file(meta);
  // A torn trailing record (crash during append) is ignored.
  std::size_t whole = bytes.size() / kMetaRecordSize * kMetaRecordSize;
  std::map<std::uint64_t, std::vector<std::uint64_t>> by_row;
  for (std::size_t off = 0; off < whole; off += kMetaRecordSize) {
    auto m = decode_meta_record(std::string_view(bytes).substr(off, kMetaRecordSize));
    if (m.mime_code >= mimes_.size()) raise(ErrorCode::CorruptFile, "unknown mime code");
    Entry e;
    e.meta = BlobMeta{BlobId{m.id}, m.length, mimes_[m.mime_code],
                      (m.flags & kMetaFlagExternal) != 0};
    if (e.meta.external) by_row[locate(e.meta.id, opts_.num_columns).row_key].push_back(m.id);
    next_id_ = std::max(next_id_, m.id + 1);
    entries_[m.id] = std::move(e);
  }
  // Rebuild chunk offsets: a row file holds its blobs' chunks in id order.
  for (auto& [row, ids] : by_row) {
    auto recs = backend_->records(row);
    std::size_t next = 0;
    for (std::uint64_t id : ids) {
      Entry& e = entries_[id];
      std::uint64_t have = 0;
      while (have < e.meta.length) {
        if (next >= recs.size()) raise(ErrorCode::CorruptFile, "row file shorter than metadata");
        e.starts.push_back(have);
        e.chunks.push_back(recs[next]);
        have += recs[next].length;
        ++next;
      }
      if (have != e.meta.length) raise(ErrorCode::CorruptFile, "chunk lengths disagree with metadata");
    }
  }
}

BlobId BlobStore::put_blob(std::string_view payload, std::string_view mime) {
  std::istringstream in{std::string(payload)};
  return put_blob(in, mime);
}

BlobId BlobStore::put_blob(std::istream& payload, std::string_view mime) {
  std::unique_lock lk(mu_);
  BlobId id{next_id_};
  Entry e;
  e.meta.id = id;
  e.meta.mime = std::string(mime);

  // Read up to the threshold to decide placement without buffering large blobs.
  std::string head(opts_.inline_threshold, '\0');
  payload.read(head.data(), static_cast<std::streamsize>(head.size()));
  head.resize(static_cast<std::size_t>(payload.gcount()));
  if (payload.bad()) raise(ErrorCode::IoError, "reading blob payload");

  std::uint32_t code = mime_code(mime);
  if (placement_for(head.size(), opts_.inline_threshold) == Placement::Inline) {
    e.meta.length = head.size();
    inline_[id.value] = std::move(head);
  } else {
    e.meta.external = true;
    std::uint64_t row = locate(id, opts_.num_columns).row_key;
    std::string buf = std::move(head);
    std::uint64_t total = 0;
    auto flush = [&](std::string_view piece) {
      e.starts.push_back(total);
      e.chunks.push_back({backend_->append(row, piece), piece.size()});
      total += piece.size();
    };
    for (;;) {
      while (buf.size() >= opts_.chunk_size) {
        flush(std::string_view(buf).substr(0, opts_.chunk_size));
        buf.erase(0, opts_.chunk_size);
      }
      if (!payload) break;
      std::string more(opts_.chunk_size, '\0');
      payload.read(more.data(), static_cast<std::streamsize>(more.size()));
      more.resize(static_cast<std::size_t>(payload.gcount()));
      if (payload.bad()) raise(ErrorCode::IoError, "reading blob payload");
      buf += more;
      if (more.empty()) break;
    }
    if (!buf.empty()) flush(buf);
    e.meta.length = total;
    backend_->sync(row);
  }

  MetaRecord rec{e.meta.length, id.value, code, e.meta.external ? kMetaFlagExternal : 0};
  if (dir_) append_file_sync(*dir_ / "blobs.meta", encode_meta_record(rec));
  entries_[id.value] = std::move(e);
  ++next_id_;
  return id;
}

const BlobStore::Entry& BlobStore::entry(BlobId id) const {
  auto it = entries_.find(id.value);
  if (it == entries_.end()) raise(ErrorCode::UnknownBlob, "blob " + std::to_string(id.value));
  return it->second;
}

bool BlobStore::contains(BlobId id) const {
  std::shared_lock lk(mu_);
  return entries_.count(id.value) != 0;
}

BlobMeta BlobStore::blob_meta(BlobId id) const {
  std::shared_lock lk(mu_);
  return entry(id).meta;
}

std::vector<BlobMeta> BlobStore::all_meta() const {
  std::shared_lock lk(mu_);
  std::vector<BlobMeta> out;
  for (const auto& [id, e] : entries_) out.push_back(e.meta);
  return out;
}

std::uint64_t BlobStore::blob_count() const {
  std::shared_lock lk(mu_);
  return entries_.size();
}

BlobId BlobStore::next_id() const {
  std::shared_lock lk(mu_);
  return BlobId{next_id_};
}

BlobHandle BlobStore::open_blob(BlobId id) const {
  std::shared_lock lk(mu_);
  const Entry& e = entry(id);
  BlobHandle h(this, e.meta);
  if (!e.meta.external) {
    auto it = inline_.find(id.value);
    if (it == inline_.end()) raise(ErrorCode::CorruptFile, "inline payload missing for blob " +
                                                               std::to_string(id.value));
    h.chunk_ = it->second;
    h.cached_chunk_ = 0;
  }
  return h;
}

std::string BlobStore::fetch_chunk(const Entry& e, std::size_t chunk) const {
  const Chunk& c = e.chunks.at(chunk);
  std::string out =
      backend_->read(locate(e.meta.id, opts_.num_columns).row_key, c.file_offset, c.length);
  fetched_.fetch_add(c.length, std::memory_order_relaxed);
  return out;
}

std::string BlobStore::read_all(BlobId id) const {
  BlobHandle h = open_blob(id);
  return h.read_range(0, h.meta().length);
}

std::string BlobStore::load_whole(BlobId id) const {
  std::shared_lock lk(mu_);
  const Entry& e = entry(id);
  if (!e.meta.external) return inline_.at(id.value);
  std::string out;
  out.reserve(e.meta.length);
  for (std::size_t i = 0; i < e.chunks.size(); ++i) out += fetch_chunk(e, i);
  return out;
}

std::map<std::uint64_t, std::string> BlobStore::inline_payloads() const {
  std::shared_lock lk(mu_);
  return inline_;
}

void BlobStore::restore_inline_payloads(std::map<std::uint64_t, std::string> payloads) {
  std::unique_lock lk(mu_);
  for (auto& [id, bytes] : payloads) {
    auto it = entries_.find(id);
    if (it == entries_.end() || it->second.meta.external || it->second.meta.length != bytes.size()) {
      raise(ErrorCode::CorruptFile, "inline payload does not match blob metadata");
    }
    inline_[id] = std::move(bytes);
  }
}

// ---------------------------------------------------------------------------
// handle

std::string BlobHandle::read_range(std::uint64_t offset, std::uint64_t len) {
  if (offset > meta_.length || len > meta_.length - offset) {
    raise(ErrorCode::RangeOutOfBounds, "range [" + std::to_string(offset) + ", +" +
                                           std::to_string(len) + ") past blob length " +
                                           std::to_string(meta_.length));
  }
  if (!meta_.external) return chunk_.substr(offset, len);

  std::shared_lock lk(store_->mu_);
  const auto& e = store_->entry(meta_.id);
  std::string out;
  out.reserve(len);
  std::uint64_t pos = offset;
  while (pos < offset + len) {
    auto it = std::upper_bound(e.starts.begin(), e.starts.end(), pos);
    auto idx = static_cast<std::size_t>(it - e.starts.begin()) - 1;
    if (cached_chunk_ != idx) {
      chunk_ = store_->fetch_chunk(e, idx);
      fetched_ += chunk_.size();
      cached_chunk_ = idx;
    }
    std::uint64_t in_chunk = pos - e.starts[idx];
    std::uint64_t take = std::min<std::uint64_t>(chunk_.size() - in_chunk, offset + len - pos);
    out.append(chunk_, in_chunk, take);
    pos += take;
  }
  cursor_ = offset + len;
  return out;
}

std::string BlobHandle::read(std::uint64_t len) {
  len = std::min(len, meta_.length - cursor_);
  return read_range(cursor_, len);
}

void BlobHandle::seek(std::uint64_t offset) {
  if (offset > meta_.length) raise(ErrorCode::RangeOutOfBounds, "seek past end of blob");
  cursor_ = offset;
}

}  // namespace blobgraph
