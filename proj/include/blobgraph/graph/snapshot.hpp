#pragma once

// Graph snapshot file.
//
//   "PGRF" | version u16 | section*
//   section := u8 tag_len | tag | u64 payload_len | payload
//
// Sections, in order: NODES, RELS, PROPS. PROPS also carries the payloads of
// inline blobs, which are stored next to the properties that reference them.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "blobgraph/common/bytes.hpp"
#include "blobgraph/graph/graph_store.hpp"

namespace blobgraph {

inline constexpr std::uint16_t kSnapshotVersion = 1;

using InlinePayloads = std::map<std::uint64_t, std::string>;  // blob id -> bytes

struct SnapshotContents {
  GraphStore graph;
  InlinePayloads inline_blobs;
};

std::string encode_snapshot(const GraphStore& g, const InlinePayloads& inline_blobs);
SnapshotContents decode_snapshot(std::string_view bytes);

// Atomic write (temp file + rename).
void save_snapshot(const GraphStore& g, const InlinePayloads& inline_blobs,
                   const std::filesystem::path& path);
SnapshotContents read_snapshot(const std::filesystem::path& path);

void encode_value(ByteWriter& w, const Value& v);
Value decode_value(ByteReader& r);

}  // namespace blobgraph
