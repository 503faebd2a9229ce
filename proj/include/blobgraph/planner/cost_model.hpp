#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

namespace blobgraph::plan {

inline constexpr double kDefaultSensitivity = 4.0;

// Observed per-row speed of one unstructured filter, as an exponential moving
// average that weights the newest observation by k.
struct FilterSpeedStats {
  std::string filter_id;
  double v = 0.0;  // seconds per input row
  std::uint64_t i = 0;
  double k = kDefaultSensitivity;

  friend bool operator==(const FilterSpeedStats&, const FilterSpeedStats&) = default;
};

// i = 1: v = cost / rows; afterwards v = (v + k * cost / rows) / (k + 1).
// ZeroRows when rows is 0, InvalidConfig on a negative cost.
FilterSpeedStats record_invocation(FilterSpeedStats s, double cost_secs, std::uint64_t rows);

// v * rows, or default_v * rows before the first invocation.
double expected_cost(const FilterSpeedStats& s, double expected_rows, double default_v);

using SpeedSnapshot = std::map<std::string, FilterSpeedStats>;

// Thread-safe store of speed statistics. Each filter id holds an immutable
// record that is swapped on update, so snapshots never see a torn value.
class SpeedStatsRegistry {
 public:
  explicit SpeedStatsRegistry(double k = kDefaultSensitivity);

  double sensitivity() const noexcept { return k_; }
  void set_sensitivity(double k);

  std::optional<FilterSpeedStats> get(const std::string& filter_id) const;
  FilterSpeedStats record(const std::string& filter_id, double cost_secs, std::uint64_t rows);
  void put(FilterSpeedStats s);
  SpeedSnapshot snapshot() const;
  void clear();

  // One line per filter: "filter_id v i k".
  std::string serialize() const;
  void deserialize(const std::string& text);
  void save(const std::filesystem::path& path) const;
  // A missing file leaves the registry empty.
  void load(const std::filesystem::path& path);

 private:
  double k_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<const FilterSpeedStats>> cells_;
};

// Row-count estimation factors.
struct CardinalityModel {
  double structured_selectivity = 0.1;
  double unstructured_selectivity = 0.05;
  double join_correction = 0.1;
};

// Seconds per row for the operators whose speed is not measured.
struct CostModel {
  double scan_row = 1e-6;
  double structured_row = 1e-5;
  double structured_indexed_row = 1e-6;
  double expand_in_row = 1e-6;
  double expand_out_row = 1e-5;
  double join_row = 1e-6;
  double projection_row = 1e-6;
  double shortest_path_row = 1e-4;
  double default_v = 0.1;
};

}  // namespace blobgraph::plan
