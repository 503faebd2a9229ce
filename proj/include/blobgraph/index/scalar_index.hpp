#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "blobgraph/index/semantic_space.hpp"

namespace blobgraph {

// Ordered index over a Number space.
class NumericIndex {
 public:
  // KindMismatch unless the space holds numbers.
  static NumericIndex build(const SemanticSpace& space);

  void insert(ItemId id, double v);
  // Ids with lo <= value <= hi, ascending.
  std::vector<ItemId> range(double lo, double hi) const;
  std::size_t size() const noexcept { return entries_.size(); }

 private:
  std::multimap<double, ItemId> entries_;
};

// Inverted index over a Text or Categorical space. Text is tokenized
// (lowercase, split on whitespace and punctuation); a categorical value is a
// single exact token.
class TextIndex {
 public:
  static TextIndex build(const SemanticSpace& space);

  void insert(ItemId id, const SemanticValue& v);
  // Posting list for one token, ascending. Text lookups lowercase the token.
  std::vector<ItemId> lookup(const std::string& token) const;
  std::size_t token_count() const noexcept { return postings_.size(); }

 private:
  explicit TextIndex(SemanticKind kind) : kind_(kind) {}

  SemanticKind kind_;
  std::map<std::string, std::set<ItemId>> postings_;
};

std::vector<ItemId> numeric_range(const SemanticSpace& space, double lo, double hi);
std::vector<ItemId> text_lookup(const SemanticSpace& space, const std::string& token);

}  // namespace blobgraph
