#pragma once

// Bucketed vector index. Cores are sampled from the space; each vector lives in
// the bucket of its nearest core (Euclidean). A query scans the nprobe buckets
// whose cores are nearest and linearly searches them.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <unordered_set>
#include <vector>

#include "blobgraph/index/semantic_space.hpp"

namespace blobgraph {

struct Neighbor {
  ItemId id = 0;
  double distance = 0.0;
  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

// Ascending distance, ties by ascending id.
using KnnResult = std::vector<Neighbor>;

struct BuildOptions {
  std::uint64_t bucket_divisor = 100000;
  std::uint64_t min_buckets = 1;
  // Overrides the divisor rule when set (clamped to the space size).
  std::optional<std::uint64_t> bucket_count;
  std::uint64_t seed = 0;
};

// Squared Euclidean distance accumulated in double.
double squared_distance(std::span<const float> a, std::span<const float> b);

std::uint64_t bucket_count_for(std::uint64_t space_size, const BuildOptions& opts);

class VectorIndex {
 public:
  struct Member {
    ItemId id;
    std::vector<float> v;
  };

  // An index with the given cores and no members.
  VectorIndex(std::uint32_t dim, std::vector<std::vector<float>> cores, std::uint32_t serial);

  // EmptySpace, KindMismatch (space is not Vector).
  static VectorIndex build(const SemanticSpace& space, const BuildOptions& opts = {});

  VectorIndex(VectorIndex&&) noexcept;
  VectorIndex& operator=(VectorIndex&&) noexcept;
  ~VectorIndex();

  // Nearest core; ties to the lowest bucket id. DimMismatch.
  std::size_t pick_bucket(std::span<const float> v) const;
  // DuplicateId, DimMismatch. Locks only the target bucket for writing.
  void insert(ItemId id, std::vector<float> v);

  // DimMismatch; InvalidConfig for k or nprobe of zero.
  KnnResult knn(std::span<const float> q, std::size_t k, std::size_t nprobe) const;
  // Same, after checking the index was built for the space's serial (StaleIndex).
  KnnResult knn(const SemanticSpace& space, std::span<const float> q, std::size_t k,
                std::size_t nprobe) const;
  void check_serial(const SemanticSpace& space) const;

  std::uint32_t dim() const noexcept { return dim_; }
  std::uint32_t built_for_serial() const noexcept { return serial_; }
  std::size_t bucket_count() const noexcept { return buckets_.size(); }
  std::size_t size() const;
  bool contains(ItemId id) const;
  std::vector<float> core(std::size_t bucket) const;
  std::vector<Member> bucket_members(std::size_t bucket) const;

  // "PIVF" | dim u32 | bucket count u32 | per bucket: core f32s, u64 count,
  // (u64 id, f32s)*. The serial is not stored; the loader supplies it.
  void save(const std::filesystem::path& path) const;
  static VectorIndex load(const std::filesystem::path& path, std::uint32_t serial);

 private:
  struct Bucket {
    std::vector<float> core;
    mutable std::shared_mutex mu;
    std::vector<Member> members;
  };

  void require_dim(std::size_t got) const;

  std::uint32_t dim_;
  std::uint32_t serial_;
  std::vector<std::unique_ptr<Bucket>> buckets_;
  mutable std::mutex ids_mu_;
  std::unordered_set<ItemId> ids_;
};

// Adds v to both the space and the index.
void dynamic_insert(SemanticSpace& space, VectorIndex& index, ItemId id, std::vector<float> v);

// Exact top-k by linear scan, same ordering as knn.
KnnResult brute_knn(const SemanticSpace& space, std::span<const float> q, std::size_t k);

// |approx ∩ exact| / |exact| over ids.
double recall(const KnnResult& approx, const KnnResult& exact);

}  // namespace blobgraph
