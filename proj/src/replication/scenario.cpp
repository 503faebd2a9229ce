#include "blobgraph/replication/scenario.hpp"

#include <cstdio>
#include <random>

#include "blobgraph/common/error.hpp"
#include "blobgraph/replication/workload.hpp"

namespace blobgraph {

ScenarioResult run_scenario(const ScenarioSpec& spec) {
  ClusterOptions opts = spec.cluster;
  if (spec.late_lag > 0) {
    if (opts.replicas < 2) raise(ErrorCode::InvalidConfig, "a late join needs at least two replicas");
    --opts.replicas;
  }
  ClusterSim c(opts);
  std::mt19937_64 rng(spec.workload_seed);
  for (std::size_t i = 0; i < spec.writes; ++i) {
    c.submit(random_write(rng, spec.keys));
    if (spec.read_every && i % spec.read_every == 0) c.submit("MATCH (n:P) RETURN n.k, n.v");
    c.advance(1);
  }

  ScenarioResult out;
  if (spec.late_lag > 0) {
    std::uint64_t last = c.log(c.leader()).last_version();
    out.join_version = last > spec.late_lag ? last - spec.late_lag : 0;
    out.late_joiner = c.add_replica(c.log(c.leader()).prefix(out.join_version));
    c.join(out.late_joiner);
  }
  out.quiescent = c.run_until_quiescent(spec.max_ticks);
  out.ticks = c.now();

  out.converged = out.quiescent;
  const auto& leader_log = c.log(c.leader());
  for (std::size_t i = 0; i < c.size(); ++i) {
    ReplicaReport r;
    r.id = i;
    r.role = c.role(i);
    r.version = c.applied_version(i);
    r.digest = c.digest(i);
    r.gapless = c.log(i).gapless();
    r.flagged = c.flagged(i);
    r.reads = c.reads_served(i);
    r.received = c.entries_received(i);
    if (!r.flagged)
      out.converged = out.converged && r.gapless && r.digest == c.digest(c.leader()) &&
                      c.log(i).entries() == leader_log.entries();
    out.replicas.push_back(r);
  }
  out.trace = c.trace_text();
  return out;
}

std::string format_scenario(const ScenarioResult& r) {
  std::string out = "replica\trole\tversion\tdigest\tgapless\tflagged\treads\treceived\n";
  char buf[200];
  for (const auto& x : r.replicas) {
    std::snprintf(buf, sizeof buf, "%zu\t%s\t%llu\t%016llx\t%s\t%s\t%llu\t%llu\n", x.id,
                  x.role == Role::Leader ? "leader" : "follower", static_cast<unsigned long long>(x.version),
                  static_cast<unsigned long long>(x.digest), x.gapless ? "yes" : "no", x.flagged ? "yes" : "no",
                  static_cast<unsigned long long>(x.reads), static_cast<unsigned long long>(x.received));
    out += buf;
  }
  out += std::string("converged\t") + (r.converged ? "yes" : "no") + "\n";
  out += "ticks\t" + std::to_string(r.ticks) + "\n";
  return out;
}

}  // namespace blobgraph
