#include "blobgraph/exec/datum.hpp"

#include <cmath>
#include <cstdio>

#include "blobgraph/common/error.hpp"
#include "blobgraph/common/hash.hpp"

namespace blobgraph {

namespace {

std::string number_key(double d) {
  if (std::nearbyint(d) == d && std::fabs(d) < 9.0e18) return std::to_string(static_cast<std::int64_t>(d));
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", d);
  return buf;
}

std::string path_text(const Path& p) {
  std::string s;
  for (std::size_t i = 0; i < p.nodes.size(); ++i) {
    if (i) s += ",r" + std::to_string(p.rels[i - 1].value) + ",";
    s += "n" + std::to_string(p.nodes[i].value);
  }
  return s;
}

}  // namespace

bool datum_equal(const Datum& a, const Datum& b) {
  const auto* va = std::get_if<Value>(&a);
  const auto* vb = std::get_if<Value>(&b);
  if (va && vb) {
    if (is_numeric(*va) && is_numeric(*vb)) {
      if (std::holds_alternative<std::int64_t>(*va) && std::holds_alternative<std::int64_t>(*vb))
        return std::get<std::int64_t>(*va) == std::get<std::int64_t>(*vb);
      return as_double(*va) == as_double(*vb);
    }
    return *va == *vb;
  }
  if (a.index() != b.index()) return false;
  if (const auto* ta = std::get_if<TransientBlobPtr>(&a)) {
    const auto& tb = std::get<TransientBlobPtr>(b);
    return ta->get() == tb.get() || (*ta)->bytes == tb->bytes;
  }
  return a == b;
}

std::string datum_key(const Datum& d) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return "null";
        } else if constexpr (std::is_same_v<T, Value>) {
          switch (kind_of(x)) {
            case ValueKind::Integer: return "num:" + std::to_string(std::get<std::int64_t>(x));
            case ValueKind::Float: return "num:" + number_key(std::get<double>(x));
            case ValueKind::Text: return "str:" + std::get<std::string>(x);
            case ValueKind::Boolean: return std::get<bool>(x) ? "bool:true" : "bool:false";
            case ValueKind::Blob: return "blob:" + std::to_string(std::get<BlobRef>(x).id.value);
          }
          return "?";
        } else if constexpr (std::is_same_v<T, NodeId>) {
          return "node:" + std::to_string(x.value);
        } else if constexpr (std::is_same_v<T, RelId>) {
          return "rel:" + std::to_string(x.value);
        } else if constexpr (std::is_same_v<T, Path>) {
          return "path:" + path_text(x);
        } else if constexpr (std::is_same_v<T, SemanticValue>) {
          return "sem:" + semantic_to_string(x);
        } else {
          return "tblob:" + std::to_string(x->bytes.size()) + ":" + std::to_string(fnv1a64(x->bytes));
        }
      },
      d);
}

std::string render_datum(const Datum& d, const BlobStore& blobs) {
  return std::visit(
      [&](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return {};
        } else if constexpr (std::is_same_v<T, Value>) {
          if (const auto* b = std::get_if<BlobRef>(&x)) {
            if (!blobs.contains(b->id)) return "blob:" + std::to_string(b->id.value);
            auto m = blobs.blob_meta(b->id);
            return "blob:" + std::to_string(m.id.value) + ":" + m.mime + ":" + std::to_string(m.length);
          }
          return value_to_string(x);
        } else if constexpr (std::is_same_v<T, NodeId>) {
          return "node:" + std::to_string(x.value);
        } else if constexpr (std::is_same_v<T, RelId>) {
          return "rel:" + std::to_string(x.value);
        } else if constexpr (std::is_same_v<T, Path>) {
          return "path:" + path_text(x);
        } else if constexpr (std::is_same_v<T, SemanticValue>) {
          return semantic_to_string(x);
        } else {
          return "blob:literal:" + x->mime + ":" + std::to_string(x->bytes.size());
        }
      },
      d);
}

}  // namespace blobgraph
