#pragma once

// Values flowing between operators. A row is aligned with the schema of the
// operator that produced it.

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "blobgraph/blob/blob_store.hpp"
#include "blobgraph/common/ids.hpp"
#include "blobgraph/extraction/semantic_value.hpp"
#include "blobgraph/graph/value.hpp"

namespace blobgraph {

// Alternating node and relationship ids: nodes.size() == rels.size() + 1.
struct Path {
  std::vector<NodeId> nodes;
  std::vector<RelId> rels;
  std::size_t length() const noexcept { return rels.size(); }
  friend bool operator==(const Path&, const Path&) = default;
};

// A BLOB literal of a read query. It is never stored.
struct TransientBlob {
  std::string bytes;
  std::string mime;
};
using TransientBlobPtr = std::shared_ptr<const TransientBlob>;

// monostate is null.
using Datum = std::variant<std::monostate, Value, NodeId, RelId, Path, SemanticValue, TransientBlobPtr>;
using Row = std::vector<Datum>;

inline bool is_null(const Datum& d) noexcept { return std::holds_alternative<std::monostate>(d); }

// Structural equality. Numbers compare by value, so 1 equals 1.0.
bool datum_equal(const Datum& a, const Datum& b);

// Canonical text with a type tag; equal datums have equal keys. Used for
// hashing join keys and comparing result multisets.
std::string datum_key(const Datum& d);

// TSV form. Blobs render as blob:<id>:<mime>:<length>, nulls as the empty
// string.
std::string render_datum(const Datum& d, const BlobStore& blobs);

}  // namespace blobgraph
