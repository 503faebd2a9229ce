#pragma once

// Deterministic simulation of a single-leader cluster that replicates write
// statements.
//
// Every replica holds the full graph in its own Database. Writes go to the
// leader, which assigns the next version, logs the statement, applies it and
// acknowledges; followers receive log entries over a simulated bus and apply
// them in version order. Reads run on one randomly chosen available replica.
//
// The bus delivers each message after a uniformly drawn delay, keeps FIFO
// order per link and drops messages with a fixed probability. The leader
// resends unacknowledged entries every `retransmit_every` ticks. All
// randomness comes from one seeded generator, so a seed fixes the trace.

#include <cstdint>
#include <map>
#include <memory>
#include <queue>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "blobgraph/db/database.hpp"
#include "blobgraph/replication/write_log.hpp"

namespace blobgraph {

struct ClusterOptions {
  std::size_t replicas = 3;
  std::size_t leader = 0;
  std::uint64_t seed = 1;
  double drop_probability = 0.0;
  // Fault injection: an append message has one statement altered in transit.
  double corrupt_probability = 0.0;
  std::uint32_t min_delay = 0;  // ticks
  std::uint32_t max_delay = 0;
  std::uint32_t retransmit_every = 10;
  std::size_t max_batch = 64;  // entries per append message
  DatabaseOptions engine;      // per replica; data_dir is ignored
};

enum class Role { Leader, Follower };

struct Submitted {
  ResultSet result;
  QueryKind kind = QueryKind::Read;
  std::size_t replica = 0;    // where it ran
  std::uint64_t version = 0;  // writes: the assigned version
};

class ClusterSim {
 public:
  explicit ClusterSim(ClusterOptions opts);
  ~ClusterSim();

  ClusterSim(const ClusterSim&) = delete;
  ClusterSim& operator=(const ClusterSim&) = delete;

  // NoLeader for a write while the leader is offline; ReplicaUnavailable for
  // a read when no replica can serve it.
  Submitted submit(std::string_view text, const std::map<std::string, Value>& params = {});

  void tick();
  void advance(std::uint64_t ticks);
  // No message in flight and every serving follower has acknowledged the
  // leader's last version.
  bool quiescent() const;
  bool run_until_quiescent(std::uint64_t max_ticks = 1000000);

  // A node holding `local_log`, replayed into its engine. It takes part only
  // after join().
  std::size_t add_replica(const WriteLog& local_log);
  // Equal logs: serves at once. Behind: fetches and replays the missing
  // suffix, serving once consistent. DivergentLog, and the node is flagged,
  // when its log is not a prefix of the leader's.
  void join(std::size_t replica);
  // Offline replicas lose every message addressed to them and serve nothing.
  void set_online(std::size_t replica, bool online);

  std::size_t size() const noexcept { return replicas_.size(); }
  std::size_t leader() const noexcept { return opts_.leader; }
  Role role(std::size_t r) const { return r == opts_.leader ? Role::Leader : Role::Follower; }
  const WriteLog& log(std::size_t r) const { return replicas_.at(r).log; }
  std::uint64_t applied_version(std::size_t r) const { return replicas_.at(r).log.last_version(); }
  bool serving(std::size_t r) const;
  bool flagged(std::size_t r) const { return replicas_.at(r).flagged; }
  std::uint64_t reads_served(std::size_t r) const { return replicas_.at(r).reads; }
  std::uint64_t entries_received(std::size_t r) const { return replicas_.at(r).received; }
  Database& engine(std::size_t r) { return *replicas_.at(r).db; }
  std::uint64_t digest(std::size_t r) const { return replicas_.at(r).db->digest(); }

  std::uint64_t now() const noexcept { return now_; }
  const std::vector<std::string>& trace() const noexcept { return trace_; }
  std::string trace_text() const;

 private:
  struct Replica {
    WriteLog log;
    std::unique_ptr<Database> db;
    bool member = true;
    bool online = true;
    bool caught_up = true;
    bool flagged = false;
    std::uint64_t join_target = 0;
    std::uint64_t acked = 0;  // leader's view of this follower
    std::uint64_t reads = 0;
    std::uint64_t received = 0;
  };
  struct Message {
    enum class Kind { Append, Ack } kind;
    std::size_t from, to;
    std::vector<WriteLogEntry> entries;
    std::uint64_t applied = 0;
  };
  struct Event {
    std::uint64_t time, seq;
    Message msg;
  };
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      return a.time != b.time ? a.time > b.time : a.seq > b.seq;
    }
  };

  std::unique_ptr<Database> make_engine() const;
  void send(Message m);
  void send_append(std::size_t to);
  void deliver(const Message& m);
  void apply(std::size_t r, const WriteLogEntry& e);
  void log_event(const std::string& line);

  ClusterOptions opts_;
  std::mt19937_64 rng_;
  std::vector<Replica> replicas_;
  std::priority_queue<Event, std::vector<Event>, Later> bus_;
  std::map<std::pair<std::size_t, std::size_t>, std::uint64_t> link_clock_;
  std::uint64_t now_ = 0;
  std::uint64_t seq_ = 0;
  std::vector<std::string> trace_;
};

}  // namespace blobgraph
