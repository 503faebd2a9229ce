#pragma once

// Scripted cluster run: random writes with periodic reads, then a node that
// holds a stale copy of the log joins, then the bus drains.

#include <cstdint>
#include <string>
#include <vector>

#include "blobgraph/replication/cluster_sim.hpp"

namespace blobgraph {

struct ScenarioSpec {
  ClusterOptions cluster;  // replicas counts the late joiner
  std::size_t writes = 1000;
  std::size_t read_every = 10;  // 0: no reads
  std::uint64_t late_lag = 100;  // 0: nobody joins late
  int keys = 50;
  std::uint64_t workload_seed = 1;
  std::uint64_t max_ticks = 1000000;
};

struct ReplicaReport {
  std::size_t id = 0;
  Role role = Role::Follower;
  std::uint64_t version = 0;
  std::uint64_t digest = 0;
  bool gapless = false;
  bool flagged = false;
  std::uint64_t reads = 0;
  std::uint64_t received = 0;
};

struct ScenarioResult {
  std::vector<ReplicaReport> replicas;
  std::size_t late_joiner = 0;  // meaningful when late_lag > 0
  std::uint64_t join_version = 0;
  bool quiescent = false;
  bool converged = false;  // every unflagged replica matches the leader
  std::uint64_t ticks = 0;
  std::string trace;
};

ScenarioResult run_scenario(const ScenarioSpec& spec);
std::string format_scenario(const ScenarioResult& r);

}  // namespace blobgraph
