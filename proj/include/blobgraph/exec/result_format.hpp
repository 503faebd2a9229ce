#pragma once

#include <string>

#include "blobgraph/blob/blob_store.hpp"
#include "blobgraph/exec/executor.hpp"

namespace blobgraph {

enum class ResultFormat { Tsv, JsonLines };

// Header row, then one line per row. Tabs, newlines and backslashes inside
// fields are escaped as \t, \n and \\.
std::string to_tsv(const ResultSet& rs, const BlobStore& blobs);

// One JSON object per row, keyed by column.
std::string to_json_lines(const ResultSet& rs, const BlobStore& blobs);

std::string render(const ResultSet& rs, const BlobStore& blobs, ResultFormat format);

}  // namespace blobgraph
