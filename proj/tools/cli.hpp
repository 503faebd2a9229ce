#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "blobgraph/db/database.hpp"
#include "blobgraph/replication/cluster_sim.hpp"

namespace blobgraph::cli {

enum Exit : int { Ok = 0, Usage = 1, DataError = 2, EngineError = 3 };

// Line-based `key = value` file. `#` starts a comment.
//
//   data_dir, inline_threshold, chunk_size, num_columns, ema_k,
//   similarity_threshold, similarity_threshold.<space>, bucket_divisor,
//   min_buckets, replicas, leader, drop_probability, min_delay, max_delay
//
// Sizes, ema_k and thresholds must be positive; leader, delays and the drop
// probability may be zero. Unknown keys are rejected (InvalidConfig).
struct Config {
  std::optional<std::filesystem::path> data_dir;
  BlobStoreOptions blob;
  double ema_k = plan::kDefaultSensitivity;
  std::optional<double> similarity_threshold;
  std::map<std::string, double> space_thresholds;
  std::uint64_t bucket_divisor = 100000;
  std::uint64_t min_buckets = 1;
  std::size_t replicas = 5;
  std::size_t leader = 0;
  double drop_probability = 0.1;
  std::uint32_t min_delay = 0;
  std::uint32_t max_delay = 50;

  static Config parse(std::string_view text);
  static Config load(const std::filesystem::path& path);

  DatabaseOptions database_options() const;
  ClusterOptions cluster_options(std::uint64_t seed) const;
};

// "k=v,k2=v2"; values typed like CSV cells. InvalidInput on a malformed pair.
std::map<std::string, Value> parse_params(std::string_view text);

// Exit code for an engine error.
int exit_code_for(const Error& e);

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace blobgraph::cli
