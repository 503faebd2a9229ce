#include "blobgraph/extraction/extraction_service.hpp"

#include "blobgraph/common/bytes.hpp"
#include "blobgraph/common/error.hpp"
#include "blobgraph/common/file_util.hpp"

namespace blobgraph {

namespace {

constexpr std::string_view kCacheMagic = "PSEC";
constexpr std::uint16_t kCacheVersion = 1;

}  // namespace

std::string model_id_for(const std::string& sub_key, std::uint32_t serial) {
  return sub_key + "@" + std::to_string(serial);
}

ExtractionService::ExtractionService(const BlobStore& blobs, ExtractionOptions opts)
    : blobs_(blobs), opts_(std::move(opts)), host_(std::make_shared<ModelHost>()) {
  if (opts_.max_in_flight == 0) raise(ErrorCode::InvalidConfig, "max_in_flight must be positive");
  client_ = std::make_unique<AipmClient>(
      std::make_unique<InProcessTransport>(host_, opts_.max_in_flight), opts_.timeout_secs);
  pool_ = std::make_unique<ThreadPool>(opts_.max_in_flight);
}

ExtractionService::ExtractionService(const BlobStore& blobs, std::unique_ptr<AipmClient> client,
                                     ExtractionOptions opts)
    : blobs_(blobs), opts_(std::move(opts)), client_(std::move(client)) {
  if (opts_.max_in_flight == 0) raise(ErrorCode::InvalidConfig, "max_in_flight must be positive");
  pool_ = std::make_unique<ThreadPool>(opts_.max_in_flight);
}

ExtractionService::~ExtractionService() {
  pool_.reset();  // finish queued misses while the client is still alive
  client_.reset();
}

void ExtractionService::register_extractor(Extractor e) {
  if (e.sub_key.empty()) raise(ErrorCode::InvalidConfig, "extractor needs a sub-property key");
  if (e.kind == SemanticKind::Vector && e.dim == 0) {
    raise(ErrorCode::InvalidConfig, "vector extractor needs a positive dim");
  }
  {
    std::unique_lock lk(reg_mu_);
    auto& serials = registry_[e.sub_key];
    if (serials.count(e.serial)) {
      raise(ErrorCode::DuplicateSerial,
            e.sub_key + " serial " + std::to_string(e.serial) + " already registered");
    }
    serials[e.serial] = Declared{e.kind, e.kind == SemanticKind::Vector ? e.dim : 0};
  }
  if (e.fn) {
    if (!host_) raise(ErrorCode::InvalidConfig, "remote models cannot take local functions");
    host_->add_model(model_id_for(e.sub_key, e.serial), std::move(e.fn));
  }
}

std::optional<std::uint32_t> ExtractionService::latest_serial(const std::string& sub_key) const {
  std::shared_lock lk(reg_mu_);
  auto it = registry_.find(sub_key);
  if (it == registry_.end() || it->second.empty()) return std::nullopt;
  return it->second.rbegin()->first;
}

std::uint32_t ExtractionService::require_latest(const std::string& sub_key) const {
  auto s = latest_serial(sub_key);
  if (!s) raise(ErrorCode::NoExtractor, "no extractor for sub-property '" + sub_key + "'");
  return *s;
}

SpaceInfo ExtractionService::space(const std::string& sub_key) const {
  std::shared_lock lk(reg_mu_);
  auto it = registry_.find(sub_key);
  if (it == registry_.end() || it->second.empty()) {
    raise(ErrorCode::NoExtractor, "no extractor for sub-property '" + sub_key + "'");
  }
  const auto& [serial, d] = *it->second.rbegin();
  return SpaceInfo{d.kind, d.dim, serial};
}

bool ExtractionService::has_sub_key(const std::string& sub_key) const {
  return latest_serial(sub_key).has_value();
}

std::vector<std::string> ExtractionService::sub_keys() const {
  std::shared_lock lk(reg_mu_);
  std::vector<std::string> out;
  for (const auto& [k, serials] : registry_) out.push_back(k);
  return out;
}

SemanticValue ExtractionService::call_model(const std::string& sub_key, std::uint32_t serial,
                                            std::string payload) {
  Declared decl;
  {
    std::shared_lock lk(reg_mu_);
    decl = registry_.at(sub_key).at(serial);
  }
  calls_.fetch_add(1);
  AipmResponse resp = client_->roundtrip(model_id_for(sub_key, serial), std::move(payload));
  if (resp.status != AipmStatus::Ok) {
    raise(ErrorCode::ExtractorFailed,
          model_id_for(sub_key, serial) +
              (resp.status == AipmStatus::Timeout ? " timed out: " : " failed: ") + resp.payload);
  }
  SemanticValue v = resp.value();
  if (semantic_kind(v) != decl.kind) {
    raise(ErrorCode::ExtractorFailed, model_id_for(sub_key, serial) + " returned " +
                                          semantic_kind_name(semantic_kind(v)) + ", declared " +
                                          semantic_kind_name(decl.kind));
  }
  if (decl.kind == SemanticKind::Vector && semantic_dim(v) != decl.dim) {
    raise(ErrorCode::ExtractorFailed, model_id_for(sub_key, serial) + " returned dim " +
                                          std::to_string(semantic_dim(v)) + ", declared " +
                                          std::to_string(decl.dim));
  }
  if (auto defect = semantic_defect(v); !defect.empty()) {
    raise(ErrorCode::ExtractorFailed, model_id_for(sub_key, serial) + ": " + defect);
  }
  return v;
}

std::pair<std::shared_future<SemanticValue>, std::shared_ptr<std::promise<SemanticValue>>>
ExtractionService::claim(const CacheKey& key) {
  std::lock_guard lk(cache_mu_);
  // Lazy eviction of entries made under older serials.
  for (auto it = cache_.lower_bound(CacheKey{key.blob, key.sub_key, 0});
       it != cache_.end() && it->first.blob == key.blob && it->first.sub_key == key.sub_key &&
       it->first.serial < key.serial;) {
    it = cache_.erase(it);
  }
  if (auto it = cache_.find(key); it != cache_.end()) {
    hits_.fetch_add(1);
    std::promise<SemanticValue> ready;
    ready.set_value(it->second);
    return {ready.get_future().share(), nullptr};
  }
  if (auto it = in_flight_.find(key); it != in_flight_.end()) return {it->second, nullptr};
  auto promise = std::make_shared<std::promise<SemanticValue>>();
  auto fut = promise->get_future().share();
  in_flight_.emplace(key, fut);
  return {fut, promise};
}

void ExtractionService::compute(const CacheKey& key,
                                const std::shared_ptr<std::promise<SemanticValue>>& promise) {
  try {
    SemanticValue v = call_model(key.sub_key, key.serial, blobs_.read_all(key.blob));
    {
      std::lock_guard lk(cache_mu_);
      // A bump during the call makes this result stale; hand it to the waiters
      // that asked under the old serial but keep it out of the cache.
      if (latest_serial(key.sub_key) == key.serial) cache_[key] = v;
      in_flight_.erase(key);
    }
    promise->set_value(std::move(v));
  } catch (...) {
    {
      std::lock_guard lk(cache_mu_);
      in_flight_.erase(key);
    }
    promise->set_exception(std::current_exception());
  }
}

SemanticValue ExtractionService::extract(BlobId blob, const std::string& sub_key) {
  std::uint32_t serial = require_latest(sub_key);
  if (!blobs_.contains(blob)) raise(ErrorCode::UnknownBlob, "blob " + std::to_string(blob.value));
  CacheKey key{blob, sub_key, serial};
  auto [fut, promise] = claim(key);
  if (promise) compute(key, promise);
  return fut.get();
}

std::shared_future<SemanticValue> ExtractionService::extract_async(BlobId blob,
                                                                   const std::string& sub_key) {
  std::uint32_t serial = require_latest(sub_key);
  if (!blobs_.contains(blob)) raise(ErrorCode::UnknownBlob, "blob " + std::to_string(blob.value));
  CacheKey key{blob, sub_key, serial};
  auto [fut, promise] = claim(key);
  if (promise) pool_->post([this, key, promise] { compute(key, promise); });
  return fut;
}

SemanticValue ExtractionService::extract_bytes(std::string payload, const std::string& sub_key) {
  return call_model(sub_key, require_latest(sub_key), std::move(payload));
}

std::optional<SemanticValue> ExtractionService::peek(BlobId blob,
                                                     const std::string& sub_key) const {
  auto serial = latest_serial(sub_key);
  if (!serial) return std::nullopt;
  std::lock_guard lk(cache_mu_);
  auto it = cache_.find(CacheKey{blob, sub_key, *serial});
  if (it == cache_.end()) return std::nullopt;
  return it->second;
}

std::size_t ExtractionService::cache_size() const {
  std::lock_guard lk(cache_mu_);
  return cache_.size();
}

void ExtractionService::clear_cache() {
  std::lock_guard lk(cache_mu_);
  cache_.clear();
}

void ExtractionService::save_cache(const std::filesystem::path& path) const {
  ByteWriter w;
  w.raw(kCacheMagic);
  w.u16(kCacheVersion);
  std::lock_guard lk(cache_mu_);
  w.u64(cache_.size());
  for (const auto& [k, v] : cache_) {
    w.u64(k.blob.value);
    w.str(k.sub_key);
    w.u32(k.serial);
    encode_semantic(w, v);
  }
  write_file_atomic(path, w.data());
}

void ExtractionService::load_cache(const std::filesystem::path& path) {
  std::string bytes = read_file(path);
  ByteReader r(bytes);
  if (r.remaining() < 6 || r.raw(4) != kCacheMagic || r.u16() != kCacheVersion) {
    raise(ErrorCode::CorruptFile, "bad semantic cache file " + path.string());
  }
  std::map<CacheKey, SemanticValue> loaded;
  for (std::uint64_t n = r.u64(); n > 0; --n) {
    CacheKey k;
    k.blob = BlobId{r.u64()};
    k.sub_key = r.str();
    k.serial = r.u32();
    loaded[k] = decode_semantic(r);
  }
  std::lock_guard lk(cache_mu_);
  for (auto& [k, v] : loaded) cache_[k] = std::move(v);
}

}  // namespace blobgraph
