#include "blobgraph/exec/result_format.hpp"

#include <json.hpp>

namespace blobgraph {

namespace {

std::string escape_field(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\\': out += "\\\\"; break;
      default: out += c;
    }
  }
  return out;
}

nlohmann::json to_json(const Datum& d, const BlobStore& blobs) {
  return std::visit(
      [&](const auto& x) -> nlohmann::json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return nullptr;
        } else if constexpr (std::is_same_v<T, Value>) {
          switch (kind_of(x)) {
            case ValueKind::Integer: return std::get<std::int64_t>(x);
            case ValueKind::Float: return std::get<double>(x);
            case ValueKind::Text: return std::get<std::string>(x);
            case ValueKind::Boolean: return std::get<bool>(x);
            case ValueKind::Blob: {
              BlobId id = std::get<BlobRef>(x).id;
              nlohmann::json j{{"blob", id.value}};
              if (blobs.contains(id)) {
                auto m = blobs.blob_meta(id);
                j["mime"] = m.mime;
                j["length"] = m.length;
              }
              return j;
            }
          }
          return nullptr;
        } else if constexpr (std::is_same_v<T, NodeId>) {
          return nlohmann::json{{"node", x.value}};
        } else if constexpr (std::is_same_v<T, RelId>) {
          return nlohmann::json{{"rel", x.value}};
        } else if constexpr (std::is_same_v<T, Path>) {
          nlohmann::json nodes = nlohmann::json::array(), rels = nlohmann::json::array();
          for (auto n : x.nodes) nodes.push_back(n.value);
          for (auto r : x.rels) rels.push_back(r.value);
          return nlohmann::json{{"nodes", nodes}, {"rels", rels}};
        } else if constexpr (std::is_same_v<T, SemanticValue>) {
          switch (semantic_kind(x)) {
            case SemanticKind::Vector: return std::get<std::vector<float>>(x);
            case SemanticKind::Number: return std::get<double>(x);
            case SemanticKind::Text: return std::get<std::string>(x);
            case SemanticKind::Categorical: return std::get<Categorical>(x).value;
          }
          return nullptr;
        } else {
          return nlohmann::json{{"blob", nullptr}, {"mime", x->mime}, {"length", x->bytes.size()}};
        }
      },
      d);
}

}  // namespace

std::string to_tsv(const ResultSet& rs, const BlobStore& blobs) {
  std::string out;
  for (std::size_t i = 0; i < rs.columns.size(); ++i) {
    if (i) out += '\t';
    out += escape_field(rs.columns[i]);
  }
  out += '\n';
  for (const auto& row : rs.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += '\t';
      out += escape_field(render_datum(row[i], blobs));
    }
    out += '\n';
  }
  return out;
}

std::string to_json_lines(const ResultSet& rs, const BlobStore& blobs) {
  std::string out;
  for (const auto& row : rs.rows) {
    nlohmann::json j = nlohmann::json::object();
    for (std::size_t i = 0; i < row.size() && i < rs.columns.size(); ++i) j[rs.columns[i]] = to_json(row[i], blobs);
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::string render(const ResultSet& rs, const BlobStore& blobs, ResultFormat format) {
  return format == ResultFormat::Tsv ? to_tsv(rs, blobs) : to_json_lines(rs, blobs);
}

}  // namespace blobgraph
