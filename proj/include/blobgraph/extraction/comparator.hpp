#pragma once

// Logical comparison symbols over semantic values.
//
//   x :: y   similarity in [0, 1]
//   x ~: y   similarity >= threshold
//   x !: y   not (x ~: y)
//   x <: y   x is contained in y
//   x >: y   y is contained in x

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "blobgraph/extraction/semantic_value.hpp"
#include "blobgraph/graph/value.hpp"

namespace blobgraph {

enum class CompareSymbol : std::uint8_t { Similarity, Similar, NotSimilar, ContainedIn, Contains };

const char* compare_symbol_text(CompareSymbol s) noexcept;

class Comparator {
 public:
  virtual ~Comparator() = default;
  // Symmetric, 1.0 on identical inputs.
  virtual double similarity(const SemanticValue& a, const SemanticValue& b) const = 0;
  // Whether `a` is contained in `b`. The default raises UnsupportedSymbol.
  virtual bool contained_in(const SemanticValue& a, const SemanticValue& b) const;
};

// max(0, cosine).
class VectorCosine final : public Comparator {
 public:
  double similarity(const SemanticValue& a, const SemanticValue& b) const override;
};

// 1 / (1 + |a - b|).
class NumberCloseness final : public Comparator {
 public:
  double similarity(const SemanticValue& a, const SemanticValue& b) const override;
};

// Jaccard over lowercase alphanumeric tokens; containment is substring.
class TextOverlap final : public Comparator {
 public:
  double similarity(const SemanticValue& a, const SemanticValue& b) const override;
  bool contained_in(const SemanticValue& a, const SemanticValue& b) const override;
};

// 1 if equal, else 0; containment is equality.
class CategoricalMatch final : public Comparator {
 public:
  double similarity(const SemanticValue& a, const SemanticValue& b) const override;
  bool contained_in(const SemanticValue& a, const SemanticValue& b) const override;
};

inline constexpr double kDefaultSimilarityThreshold = 0.8;

// Per-space comparator dispatch. A space (sub-property key) may override the
// comparator and threshold of its kind.
class ComparatorRegistry {
 public:
  ComparatorRegistry();

  void set_kind_comparator(SemanticKind kind, std::shared_ptr<const Comparator> cmp);
  void set_space_comparator(const std::string& sub_key, std::shared_ptr<const Comparator> cmp);
  void set_threshold(const std::string& sub_key, double threshold);
  void set_default_threshold(double threshold);
  double threshold(const std::string& sub_key) const;

  // Float for ::, Boolean for the rest. KindMismatch when kinds differ.
  Value compare(CompareSymbol sym, const SemanticValue& a, const SemanticValue& b,
                const std::string& sub_key = {}) const;
  // :: is the max pairwise similarity; the boolean symbols hold if any pair does
  // (!: is the complement of ~:). EmptySet on an empty side.
  Value compare_as_set(CompareSymbol sym, const std::vector<SemanticValue>& a,
                       const std::vector<SemanticValue>& b, const std::string& sub_key = {}) const;

 private:
  const Comparator& comparator_for(SemanticKind kind, const std::string& sub_key) const;

  mutable std::shared_mutex mu_;
  std::map<SemanticKind, std::shared_ptr<const Comparator>> by_kind_;
  std::map<std::string, std::shared_ptr<const Comparator>> by_space_;
  std::map<std::string, double> thresholds_;
  double default_threshold_ = kDefaultSimilarityThreshold;
};

std::vector<std::string> text_tokens(std::string_view text);

}  // namespace blobgraph
