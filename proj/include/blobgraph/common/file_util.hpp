#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace blobgraph {

std::string read_file(const std::filesystem::path& path);

// Writes to a sibling temp file, fsyncs, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

// MIME type from the file extension; application/octet-stream if unknown.
std::string guess_mime(std::string_view name);

// Appends and fsyncs.
void append_file_sync(const std::filesystem::path& path, std::string_view contents);

}  // namespace blobgraph
