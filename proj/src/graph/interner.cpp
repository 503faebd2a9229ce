#include "blobgraph/graph/interner.hpp"

#include "blobgraph/common/error.hpp"

namespace blobgraph {

Symbol Interner::intern(std::string_view text) {
  if (auto it = ids_.find(text); it != ids_.end()) return Symbol{it->second};
  auto id = static_cast<std::uint32_t>(names_.size());
  names_.emplace_back(text);
  ids_.emplace(names_.back(), id);
  return Symbol{id};
}

std::optional<Symbol> Interner::find(std::string_view text) const {
  if (auto it = ids_.find(text); it != ids_.end()) return Symbol{it->second};
  return std::nullopt;
}

const std::string& Interner::name(Symbol s) const {
  if (s.value >= names_.size()) raise(ErrorCode::CorruptFile, "unknown symbol id");
  return names_[s.value];
}

}  // namespace blobgraph
