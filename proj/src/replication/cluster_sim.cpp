#include "blobgraph/replication/cluster_sim.hpp"

#include <algorithm>
#include <sstream>

#include "blobgraph/common/error.hpp"

namespace blobgraph {

ClusterSim::ClusterSim(ClusterOptions opts) : opts_(std::move(opts)), rng_(opts_.seed) {
  if (opts_.replicas == 0) raise(ErrorCode::InvalidConfig, "a cluster needs at least one replica");
  if (opts_.leader >= opts_.replicas) raise(ErrorCode::InvalidConfig, "leader index out of range");
  if (opts_.min_delay > opts_.max_delay) raise(ErrorCode::InvalidConfig, "min_delay exceeds max_delay");
  if (opts_.drop_probability < 0 || opts_.drop_probability >= 1)
    raise(ErrorCode::InvalidConfig, "drop probability must be in [0, 1)");
  if (opts_.corrupt_probability < 0 || opts_.corrupt_probability > 1)
    raise(ErrorCode::InvalidConfig, "corrupt probability must be in [0, 1]");
  if (opts_.retransmit_every == 0 || opts_.max_batch == 0)
    raise(ErrorCode::InvalidConfig, "retransmit_every and max_batch must be positive");
  opts_.engine.data_dir.reset();
  for (std::size_t i = 0; i < opts_.replicas; ++i) {
    Replica r;
    r.db = make_engine();
    replicas_.push_back(std::move(r));
  }
}

ClusterSim::~ClusterSim() = default;

std::unique_ptr<Database> ClusterSim::make_engine() const { return std::make_unique<Database>(opts_.engine); }

void ClusterSim::log_event(const std::string& line) { trace_.push_back(std::to_string(now_) + " " + line); }

std::string ClusterSim::trace_text() const {
  std::string out;
  for (const auto& l : trace_) out += l + "\n";
  return out;
}

bool ClusterSim::serving(std::size_t r) const {
  const auto& x = replicas_.at(r);
  return x.member && x.online && x.caught_up && !x.flagged;
}

void ClusterSim::send(Message m) {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<std::uint32_t> delay(opts_.min_delay, opts_.max_delay);
  const char* what = m.kind == Message::Kind::Append ? "append" : "ack";
  std::string label = std::string(what) + " " + std::to_string(m.from) + "->" + std::to_string(m.to);
  if (m.kind == Message::Kind::Append && !m.entries.empty())
    label += " v" + std::to_string(m.entries.front().version) + "..v" + std::to_string(m.entries.back().version);
  else if (m.kind == Message::Kind::Ack)
    label += " v" + std::to_string(m.applied);
  if (coin(rng_) < opts_.drop_probability) {
    log_event("drop " + label);
    return;
  }
  if (opts_.corrupt_probability > 0 && m.kind == Message::Kind::Append && !m.entries.empty() &&
      coin(rng_) < opts_.corrupt_probability) {
    m.entries.front().statement += " ";
    label += " corrupted";
  }
  auto& last = link_clock_[{m.from, m.to}];
  std::uint64_t at = std::max<std::uint64_t>(now_ + delay(rng_), last);
  last = at;
  log_event("send " + label + " @" + std::to_string(at));
  bus_.push(Event{at, seq_++, std::move(m)});
}

void ClusterSim::send_append(std::size_t to) {
  const auto& leader_log = replicas_[opts_.leader].log;
  auto& f = replicas_[to];
  if (f.acked >= leader_log.last_version()) return;
  Message m{Message::Kind::Append, opts_.leader, to, {}, 0};
  m.entries = leader_log.range(f.acked, f.acked + opts_.max_batch);
  send(std::move(m));
}

void ClusterSim::apply(std::size_t r, const WriteLogEntry& e) {
  auto& x = replicas_[r];
  x.log.append_entry(e);
  try {
    x.db->run(e.statement);
  } catch (const Error& err) {
    // The leader failed the same way; replaying the failure keeps replicas equal.
    log_event("replica " + std::to_string(r) + " v" + std::to_string(e.version) + " failed: " + err.what());
  }
}

void ClusterSim::deliver(const Message& m) {
  auto& to = replicas_[m.to];
  if (!to.online || !to.member) {
    log_event("lost at " + std::to_string(m.to));
    return;
  }
  if (m.kind == Message::Kind::Ack) {
    auto& f = replicas_[m.from];
    f.acked = std::max(f.acked, m.applied);
    log_event("ack " + std::to_string(m.from) + " at v" + std::to_string(m.applied));
    return;
  }
  if (to.flagged) return;
  std::size_t applied = 0;
  for (const auto& e : m.entries) {
    std::uint64_t next = to.log.last_version() + 1;
    if (e.version < next) continue;
    if (e.version > next) break;  // a gap; wait for the resend
    if (!verify(e)) {
      to.flagged = true;
      log_event("replica " + std::to_string(m.to) + " flagged: checksum mismatch at v" + std::to_string(e.version));
      return;
    }
    apply(m.to, e);
    ++to.received;
    ++applied;
  }
  log_event("replica " + std::to_string(m.to) + " applied " + std::to_string(applied) + " now v" +
            std::to_string(to.log.last_version()));
  if (!to.caught_up && to.log.last_version() >= to.join_target) {
    to.caught_up = true;
    log_event("replica " + std::to_string(m.to) + " serving");
  }
  send(Message{Message::Kind::Ack, m.to, m.from, {}, to.log.last_version()});
}

void ClusterSim::tick() {
  ++now_;
  while (!bus_.empty() && bus_.top().time <= now_) {
    Event ev = bus_.top();
    bus_.pop();
    deliver(ev.msg);
  }
  if (!replicas_[opts_.leader].online || now_ % opts_.retransmit_every != 0) return;
  for (std::size_t i = 0; i < replicas_.size(); ++i) {
    const auto& f = replicas_[i];
    if (i == opts_.leader || !f.member || f.flagged) continue;
    send_append(i);
  }
}

void ClusterSim::advance(std::uint64_t ticks) {
  for (std::uint64_t i = 0; i < ticks; ++i) tick();
}

bool ClusterSim::quiescent() const {
  if (!bus_.empty()) return false;
  std::uint64_t last = replicas_[opts_.leader].log.last_version();
  for (std::size_t i = 0; i < replicas_.size(); ++i) {
    const auto& f = replicas_[i];
    if (i == opts_.leader || !f.member || !f.online || f.flagged) continue;
    if (f.acked < last) return false;
  }
  return true;
}

bool ClusterSim::run_until_quiescent(std::uint64_t max_ticks) {
  for (std::uint64_t i = 0; i < max_ticks; ++i) {
    if (quiescent()) return true;
    tick();
  }
  return quiescent();
}

Submitted ClusterSim::submit(std::string_view text, const std::map<std::string, Value>& params) {
  Submitted out;
  out.kind = classify(text);
  if (out.kind == QueryKind::Write) {
    auto& leader = replicas_[opts_.leader];
    if (!leader.online) raise(ErrorCode::NoLeader, "leader " + std::to_string(opts_.leader) + " is offline");
    if (!params.empty())
      raise(ErrorCode::EvaluationError, "write statements are replicated as text; inline the parameters");
    const auto& e = leader.log.append(std::string(text));
    out.version = e.version;
    out.replica = opts_.leader;
    log_event("write v" + std::to_string(e.version));
    for (std::size_t i = 0; i < replicas_.size(); ++i)
      if (i != opts_.leader && replicas_[i].member && !replicas_[i].flagged) send_append(i);
    out.result = leader.db->run(text);
    return out;
  }
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < replicas_.size(); ++i)
    if (replicas_[i].member && !replicas_[i].flagged) candidates.push_back(i);
  std::shuffle(candidates.begin(), candidates.end(), rng_);
  for (auto i : candidates) {
    if (!serving(i)) {
      log_event("read: replica " + std::to_string(i) + " unavailable, retrying");
      continue;
    }
    log_event("read on " + std::to_string(i));
    out.replica = i;
    ++replicas_[i].reads;
    out.result = replicas_[i].db->run(text, params);
    return out;
  }
  raise(ErrorCode::ReplicaUnavailable, "no replica can serve reads");
}

std::size_t ClusterSim::add_replica(const WriteLog& local_log) {
  Replica r;
  r.db = make_engine();
  r.member = false;
  r.caught_up = false;
  r.log = local_log;
  // Replay stops at the first entry that is out of sequence or fails its
  // checksum; join() rejects such a log anyway.
  for (std::uint64_t v = 1; v <= local_log.entries().size(); ++v) {
    const auto& e = local_log.entries()[v - 1];
    if (e.version != v || !verify(e)) break;
    try {
      r.db->run(e.statement);
    } catch (const Error&) {
    }
  }
  replicas_.push_back(std::move(r));
  log_event("added replica " + std::to_string(replicas_.size() - 1) + " at v" +
            std::to_string(replicas_.back().log.last_version()));
  return replicas_.size() - 1;
}

void ClusterSim::join(std::size_t idx) {
  auto& r = replicas_.at(idx);
  const auto& leader_log = replicas_[opts_.leader].log;
  std::uint64_t mine = r.log.last_version();
  bool prefix = r.log.gapless() && mine <= leader_log.last_version();
  for (std::uint64_t v = 1; prefix && v <= mine; ++v) prefix = *leader_log.at(v) == *r.log.at(v);
  if (!prefix) {
    r.flagged = true;
    log_event("join " + std::to_string(idx) + " rejected: divergent log");
    raise(ErrorCode::DivergentLog, "replica " + std::to_string(idx) + " log is not a prefix of the leader's");
  }
  r.member = true;
  r.online = true;
  r.acked = mine;
  r.join_target = leader_log.last_version();
  r.caught_up = mine == r.join_target;
  log_event("join " + std::to_string(idx) + " at v" + std::to_string(mine) + ", leader at v" +
            std::to_string(r.join_target));
  if (!r.caught_up) send_append(idx);
}

void ClusterSim::set_online(std::size_t r, bool online) {
  replicas_.at(r).online = online;
  log_event("replica " + std::to_string(r) + (online ? " online" : " offline"));
}

}  // namespace blobgraph
