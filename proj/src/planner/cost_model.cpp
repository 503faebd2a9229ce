#include "blobgraph/planner/cost_model.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "blobgraph/common/error.hpp"
#include "blobgraph/common/file_util.hpp"

namespace blobgraph::plan {

FilterSpeedStats record_invocation(FilterSpeedStats s, double cost_secs, std::uint64_t rows) {
  if (rows == 0) raise(ErrorCode::ZeroRows, "filter '" + s.filter_id + "' recorded with no input rows");
  if (!(cost_secs >= 0.0)) raise(ErrorCode::InvalidConfig, "negative filter cost");
  double per_row = cost_secs / static_cast<double>(rows);
  ++s.i;
  s.v = s.i == 1 ? per_row : (s.v + s.k * per_row) / (s.k + 1.0);
  return s;
}

double expected_cost(const FilterSpeedStats& s, double expected_rows, double default_v) {
  double v = s.i == 0 ? default_v : s.v;
  return v * expected_rows;
}

SpeedStatsRegistry::SpeedStatsRegistry(double k) : k_(k) {
  if (!(k > 0.0)) raise(ErrorCode::InvalidConfig, "ema sensitivity must be positive");
}

void SpeedStatsRegistry::set_sensitivity(double k) {
  if (!(k > 0.0)) raise(ErrorCode::InvalidConfig, "ema sensitivity must be positive");
  std::lock_guard lock(mu_);
  k_ = k;
}

std::optional<FilterSpeedStats> SpeedStatsRegistry::get(const std::string& filter_id) const {
  std::lock_guard lock(mu_);
  auto it = cells_.find(filter_id);
  if (it == cells_.end()) return std::nullopt;
  return *it->second;
}

FilterSpeedStats SpeedStatsRegistry::record(const std::string& filter_id, double cost_secs, std::uint64_t rows) {
  std::lock_guard lock(mu_);
  auto it = cells_.find(filter_id);
  FilterSpeedStats cur = it == cells_.end() ? FilterSpeedStats{filter_id, 0.0, 0, k_} : *it->second;
  FilterSpeedStats next = record_invocation(cur, cost_secs, rows);
  cells_[filter_id] = std::make_shared<const FilterSpeedStats>(next);
  return next;
}

void SpeedStatsRegistry::put(FilterSpeedStats s) {
  std::lock_guard lock(mu_);
  std::string id = s.filter_id;
  cells_[id] = std::make_shared<const FilterSpeedStats>(std::move(s));
}

SpeedSnapshot SpeedStatsRegistry::snapshot() const {
  std::lock_guard lock(mu_);
  SpeedSnapshot out;
  for (const auto& [id, cell] : cells_) out.emplace(id, *cell);
  return out;
}

void SpeedStatsRegistry::clear() {
  std::lock_guard lock(mu_);
  cells_.clear();
}

std::string SpeedStatsRegistry::serialize() const {
  std::string out;
  char buf[128];
  for (const auto& [id, s] : snapshot()) {
    std::snprintf(buf, sizeof buf, " %.17g %llu %.17g\n", s.v, static_cast<unsigned long long>(s.i), s.k);
    out += id;
    out += buf;
  }
  return out;
}

void SpeedStatsRegistry::deserialize(const std::string& text) {
  std::map<std::string, std::shared_ptr<const FilterSpeedStats>> cells;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    FilterSpeedStats s;
    std::string extra;
    if (!(ls >> s.filter_id >> s.v >> s.i >> s.k) || (ls >> extra) || !(s.k > 0.0) || !std::isfinite(s.v)) {
      raise(ErrorCode::CorruptFile, "speed stats line " + std::to_string(lineno) + " is malformed");
    }
    cells[s.filter_id] = std::make_shared<const FilterSpeedStats>(s);
  }
  std::lock_guard lock(mu_);
  cells_ = std::move(cells);
}

void SpeedStatsRegistry::save(const std::filesystem::path& path) const { write_file_atomic(path, serialize()); }

void SpeedStatsRegistry::load(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    clear();
    return;
  }
  deserialize(read_file(path));
}

}  // namespace blobgraph::plan
