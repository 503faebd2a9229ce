#include "blobgraph/graph/snapshot.hpp"

#include "blobgraph/common/bytes.hpp"
#include "blobgraph/common/error.hpp"
#include "blobgraph/common/file_util.hpp"

namespace blobgraph {

namespace {

constexpr std::string_view kMagic = "PGRF";

enum PropOwner : std::uint8_t { kNodeProp = 0, kRelProp = 1, kInlineBlob = 2 };

void section(ByteWriter& out, std::string_view tag, const ByteWriter& body) {
  out.u8(static_cast<std::uint8_t>(tag.size()));
  out.raw(tag);
  out.u64(body.size());
  out.raw(body.data());
}

std::string_view expect_section(ByteReader& r, std::string_view tag) {
  auto got = r.raw(r.u8());
  if (got != tag) {
    raise(ErrorCode::CorruptFile, "expected section " + std::string(tag) + ", found " +
                                      std::string(got));
  }
  return r.raw(r.u64());
}

}  // namespace

void encode_value(ByteWriter& w, const Value& v) {
  w.u8(static_cast<std::uint8_t>(v.index()));
  switch (kind_of(v)) {
    case ValueKind::Integer: w.i64(std::get<std::int64_t>(v)); break;
    case ValueKind::Float: w.f64(std::get<double>(v)); break;
    case ValueKind::Text: w.str(std::get<std::string>(v)); break;
    case ValueKind::Boolean: w.u8(std::get<bool>(v) ? 1 : 0); break;
    case ValueKind::Blob: w.u64(std::get<BlobRef>(v).id.value); break;
  }
}

Value decode_value(ByteReader& r) {
  switch (r.u8()) {
    case 0: return r.i64();
    case 1: return r.f64();
    case 2: return r.str();
    case 3: return r.u8() != 0;
    case 4: return BlobRef{BlobId{r.u64()}};
    default: raise(ErrorCode::CorruptFile, "unknown value tag");
  }
}

std::string encode_snapshot(const GraphStore& g, const InlinePayloads& inline_blobs) {
  ByteWriter nodes;
  nodes.u64(g.next_node_id());
  nodes.u64(g.node_count());
  ByteWriter rels;
  rels.u64(g.next_rel_id());
  rels.u64(g.rel_count());
  ByteWriter props;
  std::uint64_t prop_count = 0;
  props.u64(0);  // patched below

  // for_each_node bumps the scan counter; walk ids directly instead.
  for (std::uint64_t i = 1; i < g.next_node_id(); ++i) {
    NodeId n{i};
    if (!g.has_node(n)) continue;
    nodes.u64(i);
    auto ls = g.labels(n);
    nodes.u32(static_cast<std::uint32_t>(ls.size()));
    for (const auto& l : ls) nodes.str(l);
    for (const auto& [k, v] : g.properties(n)) {
      props.u8(kNodeProp);
      props.u64(i);
      props.str(k);
      encode_value(props, v);
      ++prop_count;
    }
  }
  g.for_each_rel([&](RelId r) {
    rels.u64(r.value);
    rels.u64(g.src(r).value);
    rels.u64(g.tgt(r).value);
    rels.str(g.rel_type(r));
    for (const auto& [k, v] : g.properties(r)) {
      props.u8(kRelProp);
      props.u64(r.value);
      props.str(k);
      encode_value(props, v);
      ++prop_count;
    }
  });
  for (const auto& [id, bytes] : inline_blobs) {
    props.u8(kInlineBlob);
    props.u64(id);
    props.str(bytes);
    ++prop_count;
  }
  props.patch_u64(0, prop_count);

  ByteWriter out;
  out.raw(kMagic);
  out.u16(kSnapshotVersion);
  section(out, "NODES", nodes);
  section(out, "RELS", rels);
  section(out, "PROPS", props);
  return out.take();
}

SnapshotContents decode_snapshot(std::string_view bytes) {
  ByteReader r(bytes);
  if (r.remaining() < 6 || r.raw(4) != kMagic) raise(ErrorCode::CorruptFile, "bad snapshot magic");
  if (auto v = r.u16(); v != kSnapshotVersion) {
    raise(ErrorCode::CorruptFile, "unsupported snapshot version " + std::to_string(v));
  }
  SnapshotContents out;
  GraphStore& g = out.graph;

  ByteReader nodes(expect_section(r, "NODES"));
  std::uint64_t next_node = nodes.u64();
  for (std::uint64_t c = nodes.u64(); c > 0; --c) {
    std::uint64_t id = nodes.u64();
    std::vector<std::string> labels(nodes.u32());
    for (auto& l : labels) l = nodes.str();
    g.restore_node(NodeId{id}, labels);
  }

  ByteReader rels(expect_section(r, "RELS"));
  std::uint64_t next_rel = rels.u64();
  for (std::uint64_t c = rels.u64(); c > 0; --c) {
    std::uint64_t id = rels.u64();
    NodeId s{rels.u64()};
    NodeId t{rels.u64()};
    g.restore_rel(RelId{id}, s, t, rels.str());
  }
  g.reserve_ids(next_node, next_rel);

  ByteReader props(expect_section(r, "PROPS"));
  for (std::uint64_t c = props.u64(); c > 0; --c) {
    auto owner = props.u8();
    std::uint64_t id = props.u64();
    switch (owner) {
      case kNodeProp: {
        auto key = props.str();
        if (!g.has_node(NodeId{id})) raise(ErrorCode::CorruptFile, "property of missing node");
        g.set_property(NodeId{id}, key, decode_value(props));
        break;
      }
      case kRelProp: {
        auto key = props.str();
        if (!g.has_rel(RelId{id})) raise(ErrorCode::CorruptFile, "property of missing relationship");
        g.set_property(RelId{id}, key, decode_value(props));
        break;
      }
      case kInlineBlob: out.inline_blobs[id] = props.str(); break;
      default: raise(ErrorCode::CorruptFile, "unknown property owner");
    }
  }
  if (!r.done()) raise(ErrorCode::CorruptFile, "trailing bytes after snapshot");
  return out;
}

void save_snapshot(const GraphStore& g, const InlinePayloads& inline_blobs,
                   const std::filesystem::path& path) {
  write_file_atomic(path, encode_snapshot(g, inline_blobs));
}

SnapshotContents read_snapshot(const std::filesystem::path& path) {
  return decode_snapshot(read_file(path));
}

}  // namespace blobgraph
