#include "blobgraph/index/vector_index.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "blobgraph/common/bytes.hpp"
#include "blobgraph/common/error.hpp"
#include "blobgraph/common/file_util.hpp"

namespace blobgraph {

namespace {

constexpr std::string_view kMagic = "PIVF";

struct Candidate {
  double d2;
  ItemId id;
  bool operator<(const Candidate& o) const { return d2 != o.d2 ? d2 < o.d2 : id < o.id; }
};

KnnResult top_k(std::vector<Candidate>& cands, std::size_t k) {
  k = std::min(k, cands.size());
  std::partial_sort(cands.begin(), cands.begin() + static_cast<std::ptrdiff_t>(k), cands.end());
  KnnResult out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.push_back({cands[i].id, std::sqrt(cands[i].d2)});
  return out;
}

void require_k(std::size_t k) {
  if (k == 0) raise(ErrorCode::InvalidConfig, "k must be at least 1");
}

}  // namespace

double squared_distance(std::span<const float> a, std::span<const float> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    s += d * d;
  }
  return s;
}

std::uint64_t bucket_count_for(std::uint64_t space_size, const BuildOptions& opts) {
  std::uint64_t m;
  if (opts.bucket_count) {
    m = *opts.bucket_count;
  } else {
    if (opts.bucket_divisor == 0) raise(ErrorCode::InvalidConfig, "bucket_divisor must be positive");
    m = std::max(opts.min_buckets, space_size / opts.bucket_divisor);
  }
  return std::clamp<std::uint64_t>(m, 1, std::max<std::uint64_t>(space_size, 1));
}

VectorIndex::VectorIndex(std::uint32_t dim, std::vector<std::vector<float>> cores,
                         std::uint32_t serial)
    : dim_(dim), serial_(serial) {
  if (cores.empty()) raise(ErrorCode::InvalidConfig, "index needs at least one bucket");
  for (auto& c : cores) {
    require_dim(c.size());
    auto b = std::make_unique<Bucket>();
    b->core = std::move(c);
    buckets_.push_back(std::move(b));
  }
}

VectorIndex::VectorIndex(VectorIndex&& o) noexcept
    : dim_(o.dim_), serial_(o.serial_), buckets_(std::move(o.buckets_)), ids_(std::move(o.ids_)) {}

VectorIndex& VectorIndex::operator=(VectorIndex&& o) noexcept {
  dim_ = o.dim_;
  serial_ = o.serial_;
  buckets_ = std::move(o.buckets_);
  ids_ = std::move(o.ids_);
  return *this;
}

VectorIndex::~VectorIndex() = default;

void VectorIndex::require_dim(std::size_t got) const {
  if (got != dim_) {
    raise(ErrorCode::DimMismatch, "index dim " + std::to_string(dim_) + ", got " + std::to_string(got));
  }
}

VectorIndex VectorIndex::build(const SemanticSpace& space, const BuildOptions& opts) {
  if (space.kind() != SemanticKind::Vector) {
    raise(ErrorCode::KindMismatch, "vector index over a " +
                                       std::string(semantic_kind_name(space.kind())) + " space");
  }
  if (space.empty()) raise(ErrorCode::EmptySpace, "space " + space.sub_key() + " is empty");

  std::vector<const std::pair<const ItemId, SemanticValue>*> items;
  items.reserve(space.size());
  for (const auto& kv : space.members()) items.push_back(&kv);

  // Partial Fisher-Yates over members in id order: the first m are the cores.
  std::uint64_t m = bucket_count_for(space.size(), opts);
  std::mt19937_64 rng(opts.seed);
  std::vector<std::size_t> perm(items.size());
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t i = 0; i < m; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, perm.size() - 1);
    std::swap(perm[i], perm[pick(rng)]);
  }
  std::vector<std::vector<float>> cores;
  for (std::size_t i = 0; i < m; ++i) {
    cores.push_back(std::get<std::vector<float>>(items[perm[i]]->second));
  }

  VectorIndex index(space.dim(), std::move(cores), space.serial());
  for (const auto* kv : items) index.insert(kv->first, std::get<std::vector<float>>(kv->second));
  return index;
}

std::size_t VectorIndex::pick_bucket(std::span<const float> v) const {
  require_dim(v.size());
  std::size_t best = 0;
  double best_d = squared_distance(v, buckets_[0]->core);
  for (std::size_t b = 1; b < buckets_.size(); ++b) {
    double d = squared_distance(v, buckets_[b]->core);
    if (d < best_d) {
      best_d = d;
      best = b;
    }
  }
  return best;
}

void VectorIndex::insert(ItemId id, std::vector<float> v) {
  require_dim(v.size());
  {
    std::lock_guard lk(ids_mu_);
    if (!ids_.insert(id).second) {
      raise(ErrorCode::DuplicateId, "item " + std::to_string(id) + " already indexed");
    }
  }
  Bucket& b = *buckets_[pick_bucket(v)];
  std::unique_lock lk(b.mu);
  b.members.push_back({id, std::move(v)});
}

KnnResult VectorIndex::knn(std::span<const float> q, std::size_t k, std::size_t nprobe) const {
  require_dim(q.size());
  require_k(k);
  if (nprobe == 0) raise(ErrorCode::InvalidConfig, "nprobe must be at least 1");

  std::vector<std::pair<double, std::size_t>> order;
  order.reserve(buckets_.size());
  for (std::size_t b = 0; b < buckets_.size(); ++b) {
    order.emplace_back(squared_distance(q, buckets_[b]->core), b);
  }
  nprobe = std::min(nprobe, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(nprobe), order.end());

  std::vector<Candidate> cands;
  for (std::size_t i = 0; i < nprobe; ++i) {
    const Bucket& b = *buckets_[order[i].second];
    std::shared_lock lk(b.mu);
    for (const auto& m : b.members) cands.push_back({squared_distance(q, m.v), m.id});
  }
  return top_k(cands, k);
}

void VectorIndex::check_serial(const SemanticSpace& space) const {
  if (space.serial() != serial_) {
    raise(ErrorCode::StaleIndex, "index built for serial " + std::to_string(serial_) +
                                     ", space " + space.sub_key() + " is at " +
                                     std::to_string(space.serial()));
  }
}

KnnResult VectorIndex::knn(const SemanticSpace& space, std::span<const float> q, std::size_t k,
                           std::size_t nprobe) const {
  check_serial(space);
  return knn(q, k, nprobe);
}

std::size_t VectorIndex::size() const {
  std::lock_guard lk(ids_mu_);
  return ids_.size();
}

bool VectorIndex::contains(ItemId id) const {
  std::lock_guard lk(ids_mu_);
  return ids_.count(id) != 0;
}

std::vector<float> VectorIndex::core(std::size_t bucket) const { return buckets_.at(bucket)->core; }

std::vector<VectorIndex::Member> VectorIndex::bucket_members(std::size_t bucket) const {
  const Bucket& b = *buckets_.at(bucket);
  std::shared_lock lk(b.mu);
  return b.members;
}

void VectorIndex::save(const std::filesystem::path& path) const {
  ByteWriter w;
  w.raw(kMagic);
  w.u32(dim_);
  w.u32(static_cast<std::uint32_t>(buckets_.size()));
  for (const auto& b : buckets_) {
    std::shared_lock lk(b->mu);
    for (float f : b->core) w.f32(f);
    w.u64(b->members.size());
    for (const auto& m : b->members) {
      w.u64(m.id);
      for (float f : m.v) w.f32(f);
    }
  }
  write_file_atomic(path, w.data());
}

VectorIndex VectorIndex::load(const std::filesystem::path& path, std::uint32_t serial) {
  std::string bytes = read_file(path);
  ByteReader r(bytes);
  if (r.remaining() < 12 || r.raw(4) != kMagic) {
    raise(ErrorCode::CorruptFile, "not a vector index file: " + path.string());
  }
  std::uint32_t dim = r.u32();
  std::uint32_t nb = r.u32();
  if (dim == 0 || nb == 0) raise(ErrorCode::CorruptFile, "empty vector index header");
  auto read_vec = [&] {
    std::vector<float> v(dim);
    for (auto& f : v) f = r.f32();
    return v;
  };
  std::vector<std::vector<float>> cores;
  std::vector<std::vector<Member>> members(nb);
  for (std::uint32_t b = 0; b < nb; ++b) {
    cores.push_back(read_vec());
    std::uint64_t n = r.u64();
    // Each member takes at least 8 + 4*dim bytes.
    if (n > r.remaining() / (8 + 4ull * dim)) raise(ErrorCode::CorruptFile, "bucket count overruns file");
    for (std::uint64_t i = 0; i < n; ++i) {
      ItemId id = r.u64();
      members[b].push_back({id, read_vec()});
    }
  }
  if (r.remaining() != 0) raise(ErrorCode::CorruptFile, "trailing bytes in vector index file");
  VectorIndex index(dim, std::move(cores), serial);
  for (std::uint32_t b = 0; b < nb; ++b) {
    for (auto& m : members[b]) {
      if (!index.ids_.insert(m.id).second) raise(ErrorCode::CorruptFile, "duplicate id in index file");
      index.buckets_[b]->members.push_back(std::move(m));
    }
  }
  return index;
}

void dynamic_insert(SemanticSpace& space, VectorIndex& index, ItemId id, std::vector<float> v) {
  index.check_serial(space);
  if (space.contains(id) || index.contains(id)) {
    raise(ErrorCode::DuplicateId, "item " + std::to_string(id) + " already present");
  }
  if (v.size() != index.dim()) {
    raise(ErrorCode::DimMismatch, "index dim " + std::to_string(index.dim()) + ", got " +
                                      std::to_string(v.size()));
  }
  space.add(id, v);
  index.insert(id, std::move(v));
}

KnnResult brute_knn(const SemanticSpace& space, std::span<const float> q, std::size_t k) {
  if (space.kind() != SemanticKind::Vector) raise(ErrorCode::KindMismatch, "brute_knn over a non-vector space");
  if (q.size() != space.dim()) {
    raise(ErrorCode::DimMismatch, "space dim " + std::to_string(space.dim()) + ", got " +
                                      std::to_string(q.size()));
  }
  require_k(k);
  std::vector<Candidate> cands;
  cands.reserve(space.size());
  for (const auto& [id, v] : space.members()) {
    cands.push_back({squared_distance(q, std::get<std::vector<float>>(v)), id});
  }
  return top_k(cands, k);
}

double recall(const KnnResult& approx, const KnnResult& exact) {
  if (exact.empty()) return 1.0;
  std::unordered_set<ItemId> want;
  for (const auto& n : exact) want.insert(n.id);
  std::size_t hit = 0;
  for (const auto& n : approx) hit += want.count(n.id);
  return static_cast<double>(hit) / static_cast<double>(exact.size());
}

}  // namespace blobgraph
