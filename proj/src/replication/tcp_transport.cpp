#include "blobgraph/replication/tcp_transport.hpp"

#include <chrono>

#include "blobgraph/common/error.hpp"
#include "httplib.h"

namespace blobgraph {

struct LeaderServer::Impl {
  httplib::Server server;
};

LeaderServer::LeaderServer(Database& db, WriteLog& log) : impl_(std::make_unique<Impl>()), db_(db), log_(log) {
  auto& s = impl_->server;
  s.Post("/write", [this](const httplib::Request& req, httplib::Response& res) {
    try {
      res.set_content(std::to_string(write(req.body)), "text/plain");
    } catch (const Error& e) {
      res.status = 400;
      res.set_content(e.what(), "text/plain");
    }
  });
  s.Get("/entries", [this](const httplib::Request& req, httplib::Response& res) {
    std::uint64_t after = 0;
    if (req.has_param("after")) after = std::stoull(req.get_param_value("after"));
    std::string body;
    {
      std::lock_guard lock(mu_);
      for (const auto& e : log_.range(after, log_.last_version())) body += encode_log_record(e);
    }
    res.set_content(body, "application/octet-stream");
  });
  port_ = s.bind_to_any_port("127.0.0.1");
  if (port_ <= 0) raise(ErrorCode::InvalidConfig, "cannot bind a local port");
  thread_ = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

LeaderServer::~LeaderServer() { stop(); }

void LeaderServer::stop() {
  if (!thread_.joinable()) return;
  impl_->server.stop();
  thread_.join();
}

std::uint64_t LeaderServer::write(const std::string& statement) {
  if (classify(statement) != QueryKind::Write) raise(ErrorCode::EvaluationError, "not a write statement");
  std::lock_guard lock(mu_);
  std::uint64_t v = log_.append(statement).version;
  db_.run(statement);
  return v;
}

std::uint64_t LeaderServer::last_version() const {
  std::lock_guard lock(mu_);
  return log_.last_version();
}

FollowerClient::FollowerClient(std::string host, int port, Database& db, WriteLog& log)
    : host_(std::move(host)), port_(port), db_(db), log_(log), applied_(log.last_version()) {}

FollowerClient::~FollowerClient() { stop(); }

std::size_t FollowerClient::sync_once() {
  httplib::Client cli(host_, port_);
  cli.set_connection_timeout(1);
  auto res = cli.Get("/entries?after=" + std::to_string(log_.last_version()));
  if (!res || res->status != 200) raise(ErrorCode::ReplicaUnavailable, "leader unreachable");
  std::size_t n = 0;
  for (const auto& e : decode_log_records(res->body)) {
    log_.append_entry(e);
    try {
      db_.run(e.statement);
    } catch (const Error&) {
    }
    applied_ = e.version;
    ++n;
  }
  return n;
}

void FollowerClient::start(int poll_ms) {
  running_ = true;
  thread_ = std::thread([this, poll_ms] {
    while (running_) {
      try {
        sync_once();
      } catch (const Error&) {
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(poll_ms));
    }
  });
}

void FollowerClient::stop() {
  running_ = false;
  if (thread_.joinable()) thread_.join();
}

std::uint64_t remote_write(const std::string& host, int port, const std::string& statement) {
  httplib::Client cli(host, port);
  auto res = cli.Post("/write", statement, "text/plain");
  if (!res) raise(ErrorCode::NoLeader, "leader unreachable");
  if (res->status != 200) raise(ErrorCode::EvaluationError, res->body);
  return std::stoull(res->body);
}

}  // namespace blobgraph
