#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>

namespace blobgraph {

// Dense 64-bit identifier. The tag keeps node, relationship and blob ids
// from being mixed up at compile time.
template <typename Tag>
struct StrongId {
  std::uint64_t value = 0;

  constexpr StrongId() = default;
  constexpr explicit StrongId(std::uint64_t v) : value(v) {}

  friend constexpr auto operator<=>(StrongId, StrongId) = default;
};

template <typename Tag>
std::ostream& operator<<(std::ostream& os, StrongId<Tag> id) {
  return os << id.value;
}

struct NodeTag {};
struct RelTag {};
struct BlobTag {};

using NodeId = StrongId<NodeTag>;
using RelId = StrongId<RelTag>;
using BlobId = StrongId<BlobTag>;

}  // namespace blobgraph

template <typename Tag>
struct std::hash<blobgraph::StrongId<Tag>> {
  std::size_t operator()(blobgraph::StrongId<Tag> id) const noexcept {
    return std::hash<std::uint64_t>{}(id.value);
  }
};
