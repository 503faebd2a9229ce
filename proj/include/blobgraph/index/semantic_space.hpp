#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "blobgraph/extraction/semantic_value.hpp"

namespace blobgraph {

// Items are whatever the space is built over; the database uses blob ids.
using ItemId = std::uint64_t;

// The extracted values of one sub-property under one model serial.
class SemanticSpace {
 public:
  SemanticSpace(std::string sub_key, std::uint32_t serial, SemanticKind kind, std::uint32_t dim = 0);

  // DuplicateId, KindMismatch, DimMismatch.
  void add(ItemId id, SemanticValue v);
  bool contains(ItemId id) const { return members_.count(id) != 0; }
  const SemanticValue& at(ItemId id) const;

  const std::string& sub_key() const noexcept { return sub_key_; }
  std::uint32_t serial() const noexcept { return serial_; }
  SemanticKind kind() const noexcept { return kind_; }
  std::uint32_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return members_.size(); }
  bool empty() const noexcept { return members_.empty(); }
  const std::map<ItemId, SemanticValue>& members() const noexcept { return members_; }

 private:
  std::string sub_key_;
  std::uint32_t serial_;
  SemanticKind kind_;
  std::uint32_t dim_;
  std::map<ItemId, SemanticValue> members_;
};

}  // namespace blobgraph
