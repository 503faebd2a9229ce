#include <charconv>
#include <sstream>

#include "blobgraph/common/error.hpp"
#include "blobgraph/common/file_util.hpp"
#include "blobgraph/db/ingest.hpp"
#include "cli.hpp"

namespace blobgraph::cli {

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double number(const std::string& key, const std::string& v, bool allow_zero) {
  double d = 0;
  auto r = std::from_chars(v.data(), v.data() + v.size(), d);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size())
    raise(ErrorCode::InvalidConfig, key + ": not a number: " + v);
  if (d < 0 || (!allow_zero && d == 0))
    raise(ErrorCode::InvalidConfig, key + (allow_zero ? " must not be negative" : " must be positive"));
  return d;
}

std::uint64_t whole(const std::string& key, const std::string& v, bool allow_zero) {
  double d = number(key, v, allow_zero);
  if (d != static_cast<double>(static_cast<std::uint64_t>(d)))
    raise(ErrorCode::InvalidConfig, key + " must be a whole number");
  return static_cast<std::uint64_t>(d);
}

}  // namespace

Config Config::parse(std::string_view text) {
  Config c;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) raise(ErrorCode::InvalidConfig, "line " + std::to_string(no) + ": expected key = value");
    std::string key = trim(std::string_view(line).substr(0, eq));
    std::string v = trim(std::string_view(line).substr(eq + 1));
    if (key == "data_dir") {
      if (v.empty()) raise(ErrorCode::InvalidConfig, "data_dir is empty");
      c.data_dir = v;
    } else if (key == "inline_threshold") {
      c.blob.inline_threshold = whole(key, v, false);
    } else if (key == "chunk_size") {
      c.blob.chunk_size = whole(key, v, false);
    } else if (key == "num_columns") {
      c.blob.num_columns = whole(key, v, false);
    } else if (key == "ema_k") {
      c.ema_k = number(key, v, false);
    } else if (key == "similarity_threshold") {
      c.similarity_threshold = number(key, v, false);
    } else if (key.rfind("similarity_threshold.", 0) == 0 && key.size() > 21) {
      c.space_thresholds[key.substr(21)] = number(key, v, false);
    } else if (key == "bucket_divisor") {
      c.bucket_divisor = whole(key, v, false);
    } else if (key == "min_buckets") {
      c.min_buckets = whole(key, v, false);
    } else if (key == "replicas") {
      c.replicas = whole(key, v, false);
    } else if (key == "leader") {
      c.leader = whole(key, v, true);
    } else if (key == "drop_probability") {
      c.drop_probability = number(key, v, true);
      if (c.drop_probability >= 1) raise(ErrorCode::InvalidConfig, "drop_probability must be below 1");
    } else if (key == "min_delay") {
      c.min_delay = static_cast<std::uint32_t>(whole(key, v, true));
    } else if (key == "max_delay") {
      c.max_delay = static_cast<std::uint32_t>(whole(key, v, true));
    } else {
      raise(ErrorCode::InvalidConfig, "line " + std::to_string(no) + ": unknown key " + key);
    }
  }
  if (c.min_delay > c.max_delay) raise(ErrorCode::InvalidConfig, "min_delay exceeds max_delay");
  if (c.leader >= c.replicas) raise(ErrorCode::InvalidConfig, "leader must be below replicas");
  return c;
}

Config Config::load(const std::filesystem::path& path) {
  try {
    return parse(read_file(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidConfig) raise(ErrorCode::InvalidConfig, path.string() + ": " + e.what());
    raise(ErrorCode::InvalidConfig, "cannot read config " + path.string());
  }
}

DatabaseOptions Config::database_options() const {
  DatabaseOptions o;
  o.data_dir = data_dir;
  o.blob = blob;
  o.ema_k = ema_k;
  o.similarity_threshold = similarity_threshold;
  o.space_thresholds = space_thresholds;
  return o;
}

ClusterOptions Config::cluster_options(std::uint64_t seed) const {
  ClusterOptions o;
  o.replicas = replicas;
  o.leader = leader;
  o.seed = seed;
  o.drop_probability = drop_probability;
  o.min_delay = min_delay;
  o.max_delay = max_delay;
  o.engine = database_options();
  o.engine.data_dir.reset();
  return o;
}

std::map<std::string, Value> parse_params(std::string_view text) {
  std::map<std::string, Value> out;
  if (trim(text).empty()) return out;
  for (const auto& pair : split_csv_line(text)) {
    auto eq = pair.find('=');
    std::string key = eq == std::string::npos ? "" : trim(std::string_view(pair).substr(0, eq));
    if (key.empty()) raise(ErrorCode::InvalidInput, "parameter must be k=v: " + pair);
    out[key] = parse_cell(trim(std::string_view(pair).substr(eq + 1)));
  }
  return out;
}

}  // namespace blobgraph::cli
