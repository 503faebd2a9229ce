#include "blobgraph/extraction/comparator.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "blobgraph/common/error.hpp"

namespace blobgraph {

const char* compare_symbol_text(CompareSymbol s) noexcept {
  switch (s) {
    case CompareSymbol::Similarity: return "::";
    case CompareSymbol::Similar: return "~:";
    case CompareSymbol::NotSimilar: return "!:";
    case CompareSymbol::ContainedIn: return "<:";
    case CompareSymbol::Contains: return ">:";
  }
  return "?";
}

bool Comparator::contained_in(const SemanticValue& a, const SemanticValue&) const {
  raise(ErrorCode::UnsupportedSymbol,
        std::string("containment is undefined for ") + semantic_kind_name(semantic_kind(a)));
}

double VectorCosine::similarity(const SemanticValue& a, const SemanticValue& b) const {
  const auto& x = std::get<std::vector<float>>(a);
  const auto& y = std::get<std::vector<float>>(b);
  if (x.size() != y.size()) {
    raise(ErrorCode::DimMismatch,
          "vector dims " + std::to_string(x.size()) + " and " + std::to_string(y.size()));
  }
  if (x == y) return 1.0;
  double dot = 0, nx = 0, ny = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    dot += static_cast<double>(x[i]) * y[i];
    nx += static_cast<double>(x[i]) * x[i];
    ny += static_cast<double>(y[i]) * y[i];
  }
  if (nx == 0 || ny == 0) return 0.0;
  return std::clamp(dot / std::sqrt(nx * ny), 0.0, 1.0);
}

double NumberCloseness::similarity(const SemanticValue& a, const SemanticValue& b) const {
  return 1.0 / (1.0 + std::fabs(std::get<double>(a) - std::get<double>(b)));
}

std::vector<std::string> text_tokens(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u) || u >= 0x80) {
      cur += static_cast<char>(std::tolower(u));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

double TextOverlap::similarity(const SemanticValue& a, const SemanticValue& b) const {
  const auto& x = std::get<std::string>(a);
  const auto& y = std::get<std::string>(b);
  if (x == y) return 1.0;
  auto tx = text_tokens(x);
  auto ty = text_tokens(y);
  std::set<std::string> sx(tx.begin(), tx.end()), sy(ty.begin(), ty.end());
  if (sx.empty() && sy.empty()) return 1.0;
  std::size_t common = 0;
  for (const auto& t : sx) common += sy.count(t);
  return static_cast<double>(common) / static_cast<double>(sx.size() + sy.size() - common);
}

bool TextOverlap::contained_in(const SemanticValue& a, const SemanticValue& b) const {
  return std::get<std::string>(b).find(std::get<std::string>(a)) != std::string::npos;
}

double CategoricalMatch::similarity(const SemanticValue& a, const SemanticValue& b) const {
  return std::get<Categorical>(a) == std::get<Categorical>(b) ? 1.0 : 0.0;
}

bool CategoricalMatch::contained_in(const SemanticValue& a, const SemanticValue& b) const {
  return std::get<Categorical>(a) == std::get<Categorical>(b);
}

// ---------------------------------------------------------------------------

ComparatorRegistry::ComparatorRegistry() {
  by_kind_[SemanticKind::Vector] = std::make_shared<VectorCosine>();
  by_kind_[SemanticKind::Number] = std::make_shared<NumberCloseness>();
  by_kind_[SemanticKind::Text] = std::make_shared<TextOverlap>();
  by_kind_[SemanticKind::Categorical] = std::make_shared<CategoricalMatch>();
}

void ComparatorRegistry::set_kind_comparator(SemanticKind kind,
                                             std::shared_ptr<const Comparator> cmp) {
  std::unique_lock lk(mu_);
  by_kind_[kind] = std::move(cmp);
}

void ComparatorRegistry::set_space_comparator(const std::string& sub_key,
                                              std::shared_ptr<const Comparator> cmp) {
  std::unique_lock lk(mu_);
  by_space_[sub_key] = std::move(cmp);
}

void ComparatorRegistry::set_threshold(const std::string& sub_key, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    raise(ErrorCode::InvalidConfig, "similarity threshold must lie in [0, 1]");
  }
  std::unique_lock lk(mu_);
  thresholds_[sub_key] = threshold;
}

void ComparatorRegistry::set_default_threshold(double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    raise(ErrorCode::InvalidConfig, "similarity threshold must lie in [0, 1]");
  }
  std::unique_lock lk(mu_);
  default_threshold_ = threshold;
}

double ComparatorRegistry::threshold(const std::string& sub_key) const {
  std::shared_lock lk(mu_);
  auto it = thresholds_.find(sub_key);
  return it == thresholds_.end() ? default_threshold_ : it->second;
}

const Comparator& ComparatorRegistry::comparator_for(SemanticKind kind,
                                                     const std::string& sub_key) const {
  std::shared_lock lk(mu_);
  if (!sub_key.empty()) {
    if (auto it = by_space_.find(sub_key); it != by_space_.end()) return *it->second;
  }
  return *by_kind_.at(kind);
}

Value ComparatorRegistry::compare(CompareSymbol sym, const SemanticValue& a,
                                  const SemanticValue& b, const std::string& sub_key) const {
  if (semantic_kind(a) != semantic_kind(b)) {
    raise(ErrorCode::KindMismatch, std::string("cannot compare ") +
                                       semantic_kind_name(semantic_kind(a)) + " with " +
                                       semantic_kind_name(semantic_kind(b)));
  }
  const Comparator& cmp = comparator_for(semantic_kind(a), sub_key);
  switch (sym) {
    case CompareSymbol::Similarity: return cmp.similarity(a, b);
    case CompareSymbol::Similar: return cmp.similarity(a, b) >= threshold(sub_key);
    case CompareSymbol::NotSimilar: return !(cmp.similarity(a, b) >= threshold(sub_key));
    case CompareSymbol::ContainedIn: return cmp.contained_in(a, b);
    case CompareSymbol::Contains: return cmp.contained_in(b, a);
  }
  return false;
}

Value ComparatorRegistry::compare_as_set(CompareSymbol sym, const std::vector<SemanticValue>& a,
                                         const std::vector<SemanticValue>& b,
                                         const std::string& sub_key) const {
  if (a.empty() || b.empty()) raise(ErrorCode::EmptySet, "set comparison needs non-empty sets");
  if (sym == CompareSymbol::NotSimilar) {
    return !std::get<bool>(compare_as_set(CompareSymbol::Similar, a, b, sub_key));
  }
  if (sym == CompareSymbol::Similarity) {
    double best = 0.0;
    for (const auto& x : a) {
      for (const auto& y : b) best = std::max(best, std::get<double>(compare(sym, x, y, sub_key)));
    }
    return best;
  }
  bool any = false;
  for (const auto& x : a) {
    for (const auto& y : b) {
      // Evaluate every pair so kind errors surface regardless of order.
      any = std::get<bool>(compare(sym, x, y, sub_key)) || any;
    }
  }
  return any;
}

}  // namespace blobgraph
