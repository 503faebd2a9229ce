#pragma once

// Request/response protocol between the query engine and extractor services.
//
// TCP frame (little-endian):
//   u32 length of the rest | u8 kind (0 request, 1 response) | u64 request_id |
//   u16 model_id_len | model_id | payload
// Request payload is the raw blob bytes. Response payload is u8 status followed
// by a serialized SemanticValue (Ok) or an error message (otherwise).

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "blobgraph/common/thread_pool.hpp"
#include "blobgraph/extraction/semantic_value.hpp"

namespace blobgraph {

enum class AipmStatus : std::uint8_t { Ok = 0, ModelError = 1, Timeout = 2 };

struct AipmRequest {
  std::uint64_t request_id = 0;
  std::string model_id;
  std::string payload;
};

struct AipmResponse {
  std::uint64_t request_id = 0;
  std::string model_id;
  AipmStatus status = AipmStatus::Ok;
  std::string payload;  // serialized SemanticValue when Ok, else a message

  SemanticValue value() const { return deserialize_semantic(payload); }
};

enum class FrameKind : std::uint8_t { Request = 0, Response = 1 };

std::string encode_request_frame(const AipmRequest& req);
std::string encode_response_frame(const AipmResponse& resp);

struct DecodedFrame {
  FrameKind kind;
  AipmRequest request;    // kind == Request
  AipmResponse response;  // kind == Response
};

// `frame` excludes the leading u32 length.
DecodedFrame decode_frame(std::string_view frame);

using ModelFn = std::function<SemanticValue(std::string_view payload)>;

// Model side: resolves model ids to functions and answers requests.
class ModelHost {
 public:
  void add_model(const std::string& model_id, ModelFn fn);
  bool has_model(const std::string& model_id) const;
  AipmResponse handle(const AipmRequest& req) const;
  std::uint64_t invocations() const noexcept { return invocations_.load(); }

 private:
  mutable std::mutex mu_;
  std::map<std::string, ModelFn> models_;
  mutable std::atomic<std::uint64_t> invocations_{0};
};

// Carries requests to a model host and delivers responses back, possibly out
// of order and on another thread.
class AipmTransport {
 public:
  using ResponseFn = std::function<void(AipmResponse)>;
  using ClosedFn = std::function<void()>;

  virtual ~AipmTransport() = default;
  virtual void start(ResponseFn on_response, ClosedFn on_closed) = 0;
  // Raises TransportClosed once closed.
  virtual void send(const AipmRequest& req) = 0;
  virtual void close() = 0;
};

// Handles each request on a worker pool; same message types, no framing.
class InProcessTransport final : public AipmTransport {
 public:
  explicit InProcessTransport(std::shared_ptr<const ModelHost> host, std::size_t workers = 8);
  ~InProcessTransport() override;

  void start(ResponseFn on_response, ClosedFn on_closed) override;
  void send(const AipmRequest& req) override;
  void close() override;

 private:
  std::shared_ptr<const ModelHost> host_;
  ResponseFn on_response_;
  ClosedFn on_closed_;
  std::mutex mu_;
  bool closed_ = false;
  std::unique_ptr<ThreadPool> pool_;
};

// Client over a TCP connection to an AipmServer.
class TcpTransport final : public AipmTransport {
 public:
  TcpTransport(const std::string& host, std::uint16_t port);
  ~TcpTransport() override;

  void start(ResponseFn on_response, ClosedFn on_closed) override;
  void send(const AipmRequest& req) override;
  void close() override;

 private:
  void read_loop();

  int fd_ = -1;
  std::mutex write_mu_;
  std::atomic<bool> closed_{false};
  ResponseFn on_response_;
  ClosedFn on_closed_;
  std::thread reader_;
};

// Serves a ModelHost on a local TCP port (0 picks a free one).
class AipmServer {
 public:
  AipmServer(std::shared_ptr<const ModelHost> host, std::uint16_t port = 0);
  ~AipmServer();
  std::uint16_t port() const noexcept { return port_; }
  void stop();

 private:
  void accept_loop();
  void serve(int fd);

  std::shared_ptr<const ModelHost> host_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
  std::thread acceptor_;
  std::mutex conn_mu_;
  std::vector<int> conns_;
  std::vector<std::thread> workers_;
};

inline constexpr double kDefaultAipmTimeoutSecs = 30.0;

// Multiplexes concurrent requests over one transport by request id.
class AipmClient {
 public:
  explicit AipmClient(std::unique_ptr<AipmTransport> transport,
                      double timeout_secs = kDefaultAipmTimeoutSecs);
  ~AipmClient();

  AipmClient(const AipmClient&) = delete;
  AipmClient& operator=(const AipmClient&) = delete;

  // Sends and returns the pending response. The future holds an Error with
  // TransportClosed if the transport dies first.
  std::future<AipmResponse> submit(const std::string& model_id, std::string payload);
  // submit + wait with the configured deadline (Timeout).
  AipmResponse roundtrip(const std::string& model_id, std::string payload);

  std::size_t in_flight() const;
  double timeout_secs() const noexcept { return timeout_secs_; }
  AipmTransport& transport() noexcept { return *transport_; }

 private:
  std::pair<std::uint64_t, std::future<AipmResponse>> submit_tracked(const std::string& model_id,
                                                                     std::string payload);
  void on_response(AipmResponse resp);
  void on_closed();

  std::unique_ptr<AipmTransport> transport_;
  double timeout_secs_;
  mutable std::mutex mu_;
  std::map<std::uint64_t, std::promise<AipmResponse>> pending_;
  std::uint64_t next_id_ = 1;
  bool closed_ = false;
};

}  // namespace blobgraph
