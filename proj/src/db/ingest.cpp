#include "blobgraph/db/ingest.hpp"

#include <charconv>
#include <map>
#include <set>
#include <sstream>

#include "blobgraph/common/error.hpp"
#include "blobgraph/common/file_util.hpp"
#include "blobgraph/common/hash.hpp"

namespace blobgraph {

namespace fs = std::filesystem;

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c != '"') {
        out.back() += c;
      } else if (i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else {
        quoted = false;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  if (quoted) raise(ErrorCode::InvalidInput, "unterminated quote");
  return out;
}

Value parse_cell(const std::string& cell) {
  const char* b = cell.data();
  const char* e = b + cell.size();
  std::int64_t i = 0;
  if (auto r = std::from_chars(b, e, i); r.ec == std::errc() && r.ptr == e) return Value{i};
  double d = 0;
  if (auto r = std::from_chars(b, e, d); r.ec == std::errc() && r.ptr == e) return Value{d};
  if (cell == "true") return Value{true};
  if (cell == "false") return Value{false};
  return Value{cell};
}

namespace {

struct Table {
  fs::path path;
  std::vector<std::string> header;
  std::vector<std::pair<std::size_t, std::string>> lines;  // (line number, text)
};

Table read_table(const fs::path& path) {
  Table t{path, {}, {}};
  std::istringstream in(read_file(path));
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (t.header.empty()) {
      t.header = split_csv_line(line);
      continue;
    }
    t.lines.emplace_back(no, std::move(line));
  }
  if (t.header.empty()) raise(ErrorCode::InvalidInput, path.string() + ": missing header");
  return t;
}

void check_header(const Table& t, std::initializer_list<const char*> leading) {
  std::size_t i = 0;
  for (const char* want : leading) {
    if (i >= t.header.size() || t.header[i] != want)
      raise(ErrorCode::InvalidInput, t.path.string() + ": column " + std::to_string(i + 1) + " must be '" + want + "'");
    ++i;
  }
  std::set<std::string> seen;
  for (const auto& h : t.header) {
    if (h.empty()) raise(ErrorCode::InvalidInput, t.path.string() + ": empty column name");
    if (!seen.insert(h).second) raise(ErrorCode::InvalidInput, t.path.string() + ": duplicate column " + h);
  }
}

std::vector<std::string> split_labels(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, ';'))
    if (!cur.empty()) out.push_back(cur);
  return out;
}

std::set<std::uint64_t> read_manifest(const fs::path& p) {
  std::set<std::uint64_t> out;
  if (!fs::exists(p)) return out;
  std::istringstream in(read_file(p));
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) out.insert(std::stoull(line, nullptr, 16));
  return out;
}

std::string hex(std::uint64_t v) {
  std::ostringstream o;
  o << std::hex << v;
  return o.str();
}

}  // namespace

IngestReport ingest(Database& db, const IngestSpec& spec) {
  std::vector<Table> nodes, rels;
  for (const auto& p : spec.nodes) nodes.push_back(read_table(p));
  for (const auto& p : spec.rels) rels.push_back(read_table(p));
  for (const auto& t : nodes) check_header(t, {"id", "labels"});
  for (const auto& t : rels) check_header(t, {"src", "tgt", "type"});

  IngestReport report;
  std::uint64_t h = fnv1a64(spec.blob_key);
  for (const auto* group : {&nodes, &rels}) {
    h = fnv1a64_u64(group->size(), h);
    for (const auto& t : *group) h = fnv1a64(read_file(t.path), h);
  }
  report.content_hash = h;
  if (spec.manifest && read_manifest(*spec.manifest).count(h)) {
    report.skipped = true;
    return report;
  }

  db.write([&](GraphStore& g, BlobStore& blobs) {
    std::map<std::string, NodeId> ids;
    auto reject = [&](const Table& t, std::size_t line, const std::string& why) {
      report.rejected.push_back(t.path.string() + ":" + std::to_string(line) + ": " + why);
    };
    for (const auto& t : nodes) {
      bool has_blob = t.header.back() == "blob_path";
      fs::path blob_dir = spec.blob_dir ? *spec.blob_dir : t.path.parent_path();
      for (const auto& [no, text] : t.lines) {
        ++report.rows;
        std::vector<std::string> cells;
        try {
          cells = split_csv_line(text);
        } catch (const Error& e) {
          reject(t, no, e.what());
          continue;
        }
        if (cells.size() != t.header.size()) {
          reject(t, no, "expected " + std::to_string(t.header.size()) + " fields, got " + std::to_string(cells.size()));
          continue;
        }
        if (cells[0].empty() || ids.count(cells[0])) {
          reject(t, no, cells[0].empty() ? "empty id" : "duplicate id " + cells[0]);
          continue;
        }
        std::optional<std::string> payload;
        if (has_blob && !cells.back().empty()) {
          try {
            payload = read_file(blob_dir / cells.back());
          } catch (const Error&) {
            reject(t, no, "cannot read blob " + cells.back());
            continue;
          }
        }
        Properties props;
        std::size_t prop_end = t.header.size() - (has_blob ? 1 : 0);
        for (std::size_t c = 2; c < prop_end; ++c)
          if (!cells[c].empty()) props[t.header[c]] = parse_cell(cells[c]);
        if (payload) props[spec.blob_key] = Value{BlobRef{blobs.put_blob(*payload, guess_mime(cells.back()))}};
        ids[cells[0]] = g.create_node(split_labels(cells[1]), props);
        ++report.nodes_created;
      }
    }
    for (const auto& t : rels) {
      for (const auto& [no, text] : t.lines) {
        ++report.rows;
        std::vector<std::string> cells;
        try {
          cells = split_csv_line(text);
        } catch (const Error& e) {
          reject(t, no, e.what());
          continue;
        }
        if (cells.size() != t.header.size()) {
          reject(t, no, "expected " + std::to_string(t.header.size()) + " fields, got " + std::to_string(cells.size()));
          continue;
        }
        auto a = ids.find(cells[0]), b = ids.find(cells[1]);
        if (a == ids.end() || b == ids.end()) {
          reject(t, no, "unknown node " + (a == ids.end() ? cells[0] : cells[1]));
          continue;
        }
        if (cells[2].empty()) {
          reject(t, no, "empty relationship type");
          continue;
        }
        Properties props;
        for (std::size_t c = 3; c < cells.size(); ++c)
          if (!cells[c].empty()) props[t.header[c]] = parse_cell(cells[c]);
        g.create_rel(a->second, b->second, cells[2], props);
        ++report.rels_created;
      }
    }
  });
  db.checkpoint();
  if (spec.manifest) append_file_sync(*spec.manifest, hex(h) + "\n");
  return report;
}

}  // namespace blobgraph
