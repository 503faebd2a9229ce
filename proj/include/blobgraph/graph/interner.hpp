#pragma once

#include <compare>
#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>

namespace blobgraph {

// Interned string id. Labels, relationship types and property keys are all
// symbols of one table, so equal text always yields equal ids.
struct Symbol {
  std::uint32_t value = 0;
  friend auto operator<=>(Symbol, Symbol) = default;
};

class Interner {
 public:
  Interner() = default;
  Interner(const Interner& other) {
    for (const auto& n : other.names_) intern(n);
  }
  Interner& operator=(const Interner& other) {
    if (this != &other) {
      Interner copy(other);
      *this = std::move(copy);
    }
    return *this;
  }
  Interner(Interner&&) noexcept = default;
  Interner& operator=(Interner&&) noexcept = default;

  Symbol intern(std::string_view text);
  std::optional<Symbol> find(std::string_view text) const;
  const std::string& name(Symbol s) const;
  std::size_t size() const noexcept { return names_.size(); }

 private:
  // deque keeps element addresses stable, so the map can key on views.
  std::deque<std::string> names_;
  std::unordered_map<std::string_view, std::uint32_t> ids_;
};

}  // namespace blobgraph
