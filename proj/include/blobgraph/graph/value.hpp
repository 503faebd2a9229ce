#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include "blobgraph/common/ids.hpp"

namespace blobgraph {

struct BlobRef {
  BlobId id;
  friend auto operator<=>(const BlobRef&, const BlobRef&) = default;
};

// Property value. Alternative order is part of the snapshot format
// (the variant index is written as the value tag).
using Value = std::variant<std::int64_t, double, std::string, bool, BlobRef>;

enum class ValueKind : std::uint8_t { Integer = 0, Float = 1, Text = 2, Boolean = 3, Blob = 4 };

inline ValueKind kind_of(const Value& v) noexcept { return static_cast<ValueKind>(v.index()); }

const char* value_kind_name(ValueKind kind) noexcept;

inline bool is_numeric(const Value& v) noexcept {
  return std::holds_alternative<std::int64_t>(v) || std::holds_alternative<double>(v);
}

double as_double(const Value& v);

// Total order used by ordered property indexes. Integers and floats share one
// numeric domain, so 1 and 1.0 compare equal. Across domains the order is
// numeric < text < boolean < blob.
std::weak_ordering value_order(const Value& a, const Value& b) noexcept;

// Ordering comparison when both sides are in the same domain, nullopt otherwise.
std::optional<std::weak_ordering> value_compare(const Value& a, const Value& b) noexcept;

struct ValueLess {
  bool operator()(const Value& a, const Value& b) const noexcept { return value_order(a, b) < 0; }
};

// Text form used by the TSV result format and by the query printer for
// non-text values. Text is returned unquoted.
std::string value_to_string(const Value& v);

bool is_valid_utf8(std::string_view s) noexcept;

}  // namespace blobgraph
