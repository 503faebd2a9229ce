#include "blobgraph/extraction/semantic_value.hpp"

#include <cmath>
#include <cstdio>

#include "blobgraph/common/error.hpp"

namespace blobgraph {

const char* semantic_kind_name(SemanticKind k) noexcept {
  switch (k) {
    case SemanticKind::Vector: return "Vector";
    case SemanticKind::Number: return "Number";
    case SemanticKind::Text: return "Text";
    case SemanticKind::Categorical: return "Categorical";
  }
  return "?";
}

std::size_t semantic_dim(const SemanticValue& v) noexcept {
  if (auto* vec = std::get_if<std::vector<float>>(&v)) return vec->size();
  return 0;
}

std::string semantic_defect(const SemanticValue& v) {
  if (auto* vec = std::get_if<std::vector<float>>(&v)) {
    for (float x : *vec) {
      if (std::isnan(x)) return "vector contains NaN";
    }
  } else if (auto* d = std::get_if<double>(&v); d && std::isnan(*d)) {
    return "number is NaN";
  }
  return {};
}

void encode_semantic(ByteWriter& w, const SemanticValue& v) {
  w.u8(static_cast<std::uint8_t>(v.index()));
  switch (semantic_kind(v)) {
    case SemanticKind::Vector: {
      const auto& vec = std::get<std::vector<float>>(v);
      w.u32(static_cast<std::uint32_t>(vec.size()));
      for (float x : vec) w.f32(x);
      break;
    }
    case SemanticKind::Number: w.f64(std::get<double>(v)); break;
    case SemanticKind::Text: w.str(std::get<std::string>(v)); break;
    case SemanticKind::Categorical: w.str(std::get<Categorical>(v).value); break;
  }
}

SemanticValue decode_semantic(ByteReader& r) {
  switch (r.u8()) {
    case 0: {
      std::vector<float> vec(r.u32());
      for (auto& x : vec) x = r.f32();
      return vec;
    }
    case 1: return r.f64();
    case 2: return r.str();
    case 3: return Categorical{r.str()};
    default: raise(ErrorCode::CorruptFile, "unknown semantic value tag");
  }
}

std::string serialize_semantic(const SemanticValue& v) {
  ByteWriter w;
  encode_semantic(w, v);
  return w.take();
}

SemanticValue deserialize_semantic(std::string_view bytes) {
  ByteReader r(bytes);
  auto v = decode_semantic(r);
  if (!r.done()) raise(ErrorCode::CorruptFile, "trailing bytes after semantic value");
  return v;
}

std::string semantic_to_string(const SemanticValue& v) {
  char buf[64];
  switch (semantic_kind(v)) {
    case SemanticKind::Vector: {
      std::string s = "[";
      const auto& vec = std::get<std::vector<float>>(v);
      for (std::size_t i = 0; i < vec.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%s%.6g", i ? ", " : "", static_cast<double>(vec[i]));
        s += buf;
      }
      return s + "]";
    }
    case SemanticKind::Number:
      std::snprintf(buf, sizeof buf, "%.17g", std::get<double>(v));
      return buf;
    case SemanticKind::Text: return std::get<std::string>(v);
    case SemanticKind::Categorical: return std::get<Categorical>(v).value;
  }
  return {};
}

}  // namespace blobgraph
