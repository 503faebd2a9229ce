#include "blobgraph/index/scalar_index.hpp"

#include <algorithm>

#include "blobgraph/common/error.hpp"
#include "blobgraph/extraction/comparator.hpp"

namespace blobgraph {

NumericIndex NumericIndex::build(const SemanticSpace& space) {
  if (space.kind() != SemanticKind::Number) {
    raise(ErrorCode::KindMismatch, "numeric index over a " +
                                       std::string(semantic_kind_name(space.kind())) + " space");
  }
  NumericIndex idx;
  for (const auto& [id, v] : space.members()) idx.insert(id, std::get<double>(v));
  return idx;
}

void NumericIndex::insert(ItemId id, double v) { entries_.emplace(v, id); }

std::vector<ItemId> NumericIndex::range(double lo, double hi) const {
  std::vector<ItemId> out;
  if (lo > hi) return out;
  for (auto it = entries_.lower_bound(lo); it != entries_.end() && it->first <= hi; ++it) {
    out.push_back(it->second);
  }
  std::sort(out.begin(), out.end());
  return out;
}

TextIndex TextIndex::build(const SemanticSpace& space) {
  if (space.kind() != SemanticKind::Text && space.kind() != SemanticKind::Categorical) {
    raise(ErrorCode::KindMismatch, "inverted index over a " +
                                       std::string(semantic_kind_name(space.kind())) + " space");
  }
  TextIndex idx(space.kind());
  for (const auto& [id, v] : space.members()) idx.insert(id, v);
  return idx;
}

void TextIndex::insert(ItemId id, const SemanticValue& v) {
  if (semantic_kind(v) != kind_) raise(ErrorCode::KindMismatch, "value kind differs from index kind");
  if (kind_ == SemanticKind::Categorical) {
    postings_[std::get<Categorical>(v).value].insert(id);
    return;
  }
  for (auto& tok : text_tokens(std::get<std::string>(v))) postings_[tok].insert(id);
}

std::vector<ItemId> TextIndex::lookup(const std::string& token) const {
  std::string key = token;
  if (kind_ == SemanticKind::Text) {
    auto toks = text_tokens(token);
    if (toks.size() != 1) return {};
    key = toks.front();
  }
  auto it = postings_.find(key);
  if (it == postings_.end()) return {};
  return {it->second.begin(), it->second.end()};
}

std::vector<ItemId> numeric_range(const SemanticSpace& space, double lo, double hi) {
  return NumericIndex::build(space).range(lo, hi);
}

std::vector<ItemId> text_lookup(const SemanticSpace& space, const std::string& token) {
  return TextIndex::build(space).lookup(token);
}

}  // namespace blobgraph
