#pragma once

#include <cstdint>

#include "blobgraph/blob/blob_store.hpp"
#include "blobgraph/graph/graph_store.hpp"

namespace blobgraph {

// Order-independent hash of the logical state: every live node (id, labels,
// properties), relationship (id, endpoints, type, properties) and blob
// (id, length, mime). Equal for equal states however they were built.
std::uint64_t state_digest(const GraphStore& g, const BlobStore& blobs);

}  // namespace blobgraph
