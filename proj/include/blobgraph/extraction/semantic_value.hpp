#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "blobgraph/common/bytes.hpp"

namespace blobgraph {

struct Categorical {
  std::string value;
  friend auto operator<=>(const Categorical&, const Categorical&) = default;
};

// Value of one sub-property, e.g. a face embedding or a detected animal class.
using SemanticValue = std::variant<std::vector<float>, double, std::string, Categorical>;

enum class SemanticKind : std::uint8_t { Vector = 0, Number = 1, Text = 2, Categorical = 3 };

inline SemanticKind semantic_kind(const SemanticValue& v) noexcept {
  return static_cast<SemanticKind>(v.index());
}

const char* semantic_kind_name(SemanticKind k) noexcept;

// Vector dimension, 0 for scalar kinds.
std::size_t semantic_dim(const SemanticValue& v) noexcept;

// Rejects NaN components; returns the offending description or empty.
std::string semantic_defect(const SemanticValue& v);

// tag u8 | Vector: u32 dim, f32*dim | Number: f64 | Text/Categorical: u32 len, bytes
void encode_semantic(ByteWriter& w, const SemanticValue& v);
SemanticValue decode_semantic(ByteReader& r);
std::string serialize_semantic(const SemanticValue& v);
SemanticValue deserialize_semantic(std::string_view bytes);

std::string semantic_to_string(const SemanticValue& v);

}  // namespace blobgraph
