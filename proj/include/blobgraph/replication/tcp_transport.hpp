#pragma once

// Log shipping over local TCP (HTTP framing). Smoke-test transport: the leader
// serves its write log, followers poll it from their own threads and apply
// new entries through their engines.
//
//   POST /write            body: statement      -> version
//   GET  /entries?after=V  -> encoded log records with version > V

#include <atomic>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "blobgraph/db/database.hpp"
#include "blobgraph/replication/write_log.hpp"

namespace blobgraph {

class LeaderServer {
 public:
  LeaderServer(Database& db, WriteLog& log);
  ~LeaderServer();

  LeaderServer(const LeaderServer&) = delete;
  LeaderServer& operator=(const LeaderServer&) = delete;

  int port() const noexcept { return port_; }
  // Logs, applies and returns the version.
  std::uint64_t write(const std::string& statement);
  std::uint64_t last_version() const;
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  Database& db_;
  WriteLog& log_;
  mutable std::mutex mu_;
  int port_ = 0;
  std::thread thread_;
};

class FollowerClient {
 public:
  FollowerClient(std::string host, int port, Database& db, WriteLog& log);

  // One poll. Returns the number of entries applied; ChecksumMismatch or
  // DivergentLog on a bad response, ReplicaUnavailable if the leader is
  // unreachable.
  std::size_t sync_once();

  // Polls on a background thread until stop().
  void start(int poll_ms = 5);
  void stop();
  ~FollowerClient();

  std::uint64_t applied_version() const { return applied_.load(); }

 private:
  std::string host_;
  int port_;
  Database& db_;
  WriteLog& log_;
  std::atomic<std::uint64_t> applied_{0};
  std::atomic<bool> running_{false};
  std::thread thread_;
};

// Writes through a running leader's HTTP endpoint; returns the version.
std::uint64_t remote_write(const std::string& host, int port, const std::string& statement);

}  // namespace blobgraph
