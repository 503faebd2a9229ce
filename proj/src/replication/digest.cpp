#include "blobgraph/replication/digest.hpp"

#include "blobgraph/common/bytes.hpp"
#include "blobgraph/common/hash.hpp"
#include "blobgraph/graph/snapshot.hpp"

namespace blobgraph {

namespace {

std::uint64_t props_hash(const Properties& props) {
  ByteWriter w;
  for (const auto& [k, v] : props) {
    w.str(k);
    encode_value(w, v);
  }
  return fnv1a64(w.data());
}

}  // namespace

std::uint64_t state_digest(const GraphStore& g, const BlobStore& blobs) {
  // Entity hashes are mixed and summed, so iteration order does not matter.
  std::uint64_t sum = 0;
  g.for_each_node([&](NodeId n) {
    std::uint64_t h = fnv1a64_u64(n.value, 0x4e4f4445);
    for (const auto& l : g.labels(n)) h = hash_combine(h, fnv1a64(l));
    h = hash_combine(h, props_hash(g.properties(n)));
    sum += mix64(h);
  });
  g.for_each_rel([&](RelId r) {
    std::uint64_t h = fnv1a64_u64(r.value, 0x52454c);
    h = hash_combine(h, g.src(r).value);
    h = hash_combine(h, g.tgt(r).value);
    h = hash_combine(h, fnv1a64(g.rel_type(r)));
    h = hash_combine(h, props_hash(g.properties(r)));
    sum += mix64(h);
  });
  for (const auto& m : blobs.all_meta()) {
    std::uint64_t h = fnv1a64_u64(m.id.value, 0x424c4f42);
    h = hash_combine(h, m.length);
    h = hash_combine(h, fnv1a64(m.mime));
    sum += mix64(h);
  }
  return mix64(sum ^ (g.node_count() << 32) ^ g.rel_count());
}

}  // namespace blobgraph
