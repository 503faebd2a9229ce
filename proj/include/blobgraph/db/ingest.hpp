#pragma once

// CSV ingestion.
//
// Nodes CSV: id,labels,<prop>...[,blob_path]
//   id         external id, unique within one load
//   labels     semicolon-separated
//   blob_path  optional; file under the blob directory, stored as the
//              `blob_key` property
// Rels CSV: src,tgt,type,<prop>...
//   src, tgt   external node ids from the nodes files of the same load
//
// Fields may be double-quoted ("" escapes a quote). Property cells are typed:
// integer, then float, then true/false, else text; an empty cell sets nothing.
//
// Every header is validated before any row is applied. Rows that fail
// (column count, duplicate or unknown id, unreadable blob) are rejected and
// reported; the rest are applied.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "blobgraph/db/database.hpp"

namespace blobgraph {

struct IngestSpec {
  std::vector<std::filesystem::path> nodes;
  std::vector<std::filesystem::path> rels;
  std::optional<std::filesystem::path> blob_dir;  // default: the CSV's directory
  std::string blob_key = "photo";
  // Content-hash manifest; a load whose hash is listed is skipped.
  std::optional<std::filesystem::path> manifest;
};

struct IngestReport {
  std::uint64_t content_hash = 0;
  bool skipped = false;  // already listed in the manifest
  std::size_t rows = 0;
  std::size_t nodes_created = 0;
  std::size_t rels_created = 0;
  std::vector<std::string> rejected;  // "file:line: reason"
};

// Splits one CSV record. InvalidInput on an unterminated quote.
std::vector<std::string> split_csv_line(std::string_view line);

// Integer, float, boolean, else text.
Value parse_cell(const std::string& cell);

// InvalidInput for a bad header; IoError for an unreadable CSV.
IngestReport ingest(Database& db, const IngestSpec& spec);

}  // namespace blobgraph
