#include "blobgraph/index/semantic_space.hpp"

#include "blobgraph/common/error.hpp"

namespace blobgraph {

SemanticSpace::SemanticSpace(std::string sub_key, std::uint32_t serial, SemanticKind kind,
                             std::uint32_t dim)
    : sub_key_(std::move(sub_key)), serial_(serial), kind_(kind),
      dim_(kind == SemanticKind::Vector ? dim : 0) {
  if (kind == SemanticKind::Vector && dim == 0) {
    raise(ErrorCode::InvalidConfig, "vector space needs a positive dim");
  }
}

void SemanticSpace::add(ItemId id, SemanticValue v) {
  if (semantic_kind(v) != kind_) {
    raise(ErrorCode::KindMismatch, std::string("space ") + sub_key_ + " holds " +
                                       semantic_kind_name(kind_) + ", got " +
                                       semantic_kind_name(semantic_kind(v)));
  }
  if (kind_ == SemanticKind::Vector && semantic_dim(v) != dim_) {
    raise(ErrorCode::DimMismatch, "expected dim " + std::to_string(dim_) + ", got " +
                                      std::to_string(semantic_dim(v)));
  }
  if (!members_.emplace(id, std::move(v)).second) {
    raise(ErrorCode::DuplicateId, "item " + std::to_string(id) + " already in space " + sub_key_);
  }
}

const SemanticValue& SemanticSpace::at(ItemId id) const {
  auto it = members_.find(id);
  if (it == members_.end()) raise(ErrorCode::UnknownBlob, "item " + std::to_string(id) + " not in space");
  return it->second;
}

}  // namespace blobgraph
