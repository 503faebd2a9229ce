#include "blobgraph/extraction/aipm.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "blobgraph/common/bytes.hpp"
#include "blobgraph/common/error.hpp"

namespace blobgraph {

// ---------------------------------------------------------------------------
// framing

namespace {

std::string frame(FrameKind kind, std::uint64_t id, std::string_view model_id,
                  std::string_view payload) {
  if (model_id.size() > 0xffff) raise(ErrorCode::InvalidConfig, "model id too long");
  ByteWriter w;
  w.u32(0);
  w.u8(static_cast<std::uint8_t>(kind));
  w.u64(id);
  w.u16(static_cast<std::uint16_t>(model_id.size()));
  w.raw(model_id);
  w.raw(payload);
  w.patch_u32(0, static_cast<std::uint32_t>(w.size() - 4));
  return w.take();
}

}  // namespace

std::string encode_request_frame(const AipmRequest& req) {
  return frame(FrameKind::Request, req.request_id, req.model_id, req.payload);
}

std::string encode_response_frame(const AipmResponse& resp) {
  std::string body(1, static_cast<char>(resp.status));
  body += resp.payload;
  return frame(FrameKind::Response, resp.request_id, resp.model_id, body);
}

DecodedFrame decode_frame(std::string_view bytes) {
  ByteReader r(bytes);
  DecodedFrame out;
  auto kind = r.u8();
  std::uint64_t id = r.u64();
  std::string model(r.raw(r.u16()));
  std::string_view rest = r.raw(r.remaining());
  if (kind == static_cast<std::uint8_t>(FrameKind::Request)) {
    out.kind = FrameKind::Request;
    out.request = AipmRequest{id, std::move(model), std::string(rest)};
  } else if (kind == static_cast<std::uint8_t>(FrameKind::Response)) {
    if (rest.empty()) raise(ErrorCode::CorruptFile, "response frame without status");
    auto status = static_cast<std::uint8_t>(rest[0]);
    if (status > 2) raise(ErrorCode::CorruptFile, "unknown response status");
    out.kind = FrameKind::Response;
    out.response = AipmResponse{id, std::move(model), static_cast<AipmStatus>(status),
                                std::string(rest.substr(1))};
  } else {
    raise(ErrorCode::CorruptFile, "unknown frame kind");
  }
  return out;
}

// ---------------------------------------------------------------------------
// model host

void ModelHost::add_model(const std::string& model_id, ModelFn fn) {
  std::lock_guard lk(mu_);
  models_[model_id] = std::move(fn);
}

bool ModelHost::has_model(const std::string& model_id) const {
  std::lock_guard lk(mu_);
  return models_.count(model_id) != 0;
}

AipmResponse ModelHost::handle(const AipmRequest& req) const {
  AipmResponse resp{req.request_id, req.model_id, AipmStatus::Ok, {}};
  ModelFn fn;
  {
    std::lock_guard lk(mu_);
    auto it = models_.find(req.model_id);
    if (it != models_.end()) fn = it->second;
  }
  if (!fn) {
    resp.status = AipmStatus::ModelError;
    resp.payload = "no model " + req.model_id;
    return resp;
  }
  invocations_.fetch_add(1);
  try {
    resp.payload = serialize_semantic(fn(req.payload));
  } catch (const std::exception& e) {
    resp.status = AipmStatus::ModelError;
    resp.payload = e.what();
  }
  return resp;
}

// ---------------------------------------------------------------------------
// in-process transport

InProcessTransport::InProcessTransport(std::shared_ptr<const ModelHost> host, std::size_t workers)
    : host_(std::move(host)), pool_(std::make_unique<ThreadPool>(workers)) {}

InProcessTransport::~InProcessTransport() {
  close();
  pool_.reset();
}

void InProcessTransport::start(ResponseFn on_response, ClosedFn on_closed) {
  on_response_ = std::move(on_response);
  on_closed_ = std::move(on_closed);
}

void InProcessTransport::send(const AipmRequest& req) {
  std::lock_guard lk(mu_);
  if (closed_) raise(ErrorCode::TransportClosed, "in-process transport is closed");
  pool_->post([this, req] {
    AipmResponse resp = host_->handle(req);
    {
      std::lock_guard lk2(mu_);
      if (closed_) return;
    }
    on_response_(std::move(resp));
  });
}

void InProcessTransport::close() {
  {
    std::lock_guard lk(mu_);
    if (closed_) return;
    closed_ = true;
  }
  if (on_closed_) on_closed_();
}

// ---------------------------------------------------------------------------
// sockets

namespace {

bool write_all(int fd, std::string_view data) {
  std::size_t done = 0;
  while (done < data.size()) {
    ssize_t n = ::send(fd, data.data() + done, data.size() - done, MSG_NOSIGNAL);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return false;
    done += static_cast<std::size_t>(n);
  }
  return true;
}

bool read_exact(int fd, char* out, std::size_t len) {
  std::size_t done = 0;
  while (done < len) {
    ssize_t n = ::recv(fd, out + done, len - done, 0);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return false;
    done += static_cast<std::size_t>(n);
  }
  return true;
}

// Reads one frame body (without the length prefix); nullopt on EOF.
std::optional<std::string> read_frame(int fd) {
  std::uint32_t len = 0;
  if (!read_exact(fd, reinterpret_cast<char*>(&len), 4)) return std::nullopt;
  if (len > (1u << 30)) return std::nullopt;
  std::string body(len, '\0');
  if (!read_exact(fd, body.data(), len)) return std::nullopt;
  return body;
}

}  // namespace

TcpTransport::TcpTransport(const std::string& host, std::uint16_t port) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (::getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &res) != 0 || !res) {
    raise(ErrorCode::TransportClosed, "cannot resolve " + host);
  }
  fd_ = ::socket(res->ai_family, res->ai_socktype | SOCK_CLOEXEC, res->ai_protocol);
  if (fd_ < 0 || ::connect(fd_, res->ai_addr, res->ai_addrlen) != 0) {
    std::string why = std::strerror(errno);
    ::freeaddrinfo(res);
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
    raise(ErrorCode::TransportClosed, "connect " + host + ":" + std::to_string(port) + ": " + why);
  }
  ::freeaddrinfo(res);
  int one = 1;
  ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

TcpTransport::~TcpTransport() {
  close();
  if (reader_.joinable()) reader_.join();
  if (fd_ >= 0) ::close(fd_);
}

void TcpTransport::start(ResponseFn on_response, ClosedFn on_closed) {
  on_response_ = std::move(on_response);
  on_closed_ = std::move(on_closed);
  reader_ = std::thread([this] { read_loop(); });
}

void TcpTransport::send(const AipmRequest& req) {
  if (closed_) raise(ErrorCode::TransportClosed, "tcp transport is closed");
  std::string bytes = encode_request_frame(req);
  std::lock_guard lk(write_mu_);
  if (!write_all(fd_, bytes)) {
    close();
    raise(ErrorCode::TransportClosed, "tcp send failed");
  }
}

void TcpTransport::close() {
  if (closed_.exchange(true)) return;
  if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
  if (!reader_.joinable() && on_closed_) on_closed_();
}

void TcpTransport::read_loop() {
  for (;;) {
    auto body = read_frame(fd_);
    if (!body) break;
    try {
      auto f = decode_frame(*body);
      if (f.kind == FrameKind::Response) on_response_(std::move(f.response));
    } catch (const Error&) {
      break;
    }
  }
  closed_ = true;
  if (on_closed_) on_closed_();
}

AipmServer::AipmServer(std::shared_ptr<const ModelHost> host, std::uint16_t port)
    : host_(std::move(host)) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
  if (listen_fd_ < 0) raise(ErrorCode::IoError, std::string("socket: ") + std::strerror(errno));
  int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(port);
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 ||
      ::listen(listen_fd_, 64) != 0) {
    std::string why = std::strerror(errno);
    ::close(listen_fd_);
    raise(ErrorCode::IoError, "bind/listen: " + why);
  }
  socklen_t len = sizeof addr;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
  acceptor_ = std::thread([this] { accept_loop(); });
}

AipmServer::~AipmServer() { stop(); }

void AipmServer::stop() {
  if (stopping_.exchange(true)) return;
  ::shutdown(listen_fd_, SHUT_RDWR);
  ::close(listen_fd_);
  if (acceptor_.joinable()) acceptor_.join();
  {
    std::lock_guard lk(conn_mu_);
    for (int fd : conns_) ::shutdown(fd, SHUT_RDWR);
  }
  for (auto& t : workers_) t.join();
  for (int fd : conns_) ::close(fd);
}

void AipmServer::accept_loop() {
  while (!stopping_) {
    int fd = ::accept4(listen_fd_, nullptr, nullptr, SOCK_CLOEXEC);
    if (fd < 0) {
      if (errno == EINTR) continue;
      return;
    }
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    std::lock_guard lk(conn_mu_);
    if (stopping_) {
      ::close(fd);
      return;
    }
    conns_.push_back(fd);
    workers_.emplace_back([this, fd] { serve(fd); });
  }
}

void AipmServer::serve(int fd) {
  // Requests on one connection are handled concurrently; responses may leave
  // in any order.
  std::mutex write_mu;
  {
    ThreadPool pool(4);
    while (auto body = read_frame(fd)) {
      DecodedFrame f;
      try {
        f = decode_frame(*body);
      } catch (const Error&) {
        break;
      }
      if (f.kind != FrameKind::Request) continue;
      pool.post([this, fd, &write_mu, req = std::move(f.request)] {
        std::string out = encode_response_frame(host_->handle(req));
        std::lock_guard lk(write_mu);
        write_all(fd, out);
      });
    }
  }
  ::shutdown(fd, SHUT_RDWR);
}

// ---------------------------------------------------------------------------
// client

AipmClient::AipmClient(std::unique_ptr<AipmTransport> transport, double timeout_secs)
    : transport_(std::move(transport)), timeout_secs_(timeout_secs) {
  if (!(timeout_secs_ > 0)) raise(ErrorCode::InvalidConfig, "timeout must be positive");
  transport_->start([this](AipmResponse r) { on_response(std::move(r)); },
                    [this] { on_closed(); });
}

AipmClient::~AipmClient() {
  transport_->close();
  transport_.reset();
  on_closed();
}

std::future<AipmResponse> AipmClient::submit(const std::string& model_id, std::string payload) {
  return submit_tracked(model_id, std::move(payload)).second;
}

std::pair<std::uint64_t, std::future<AipmResponse>> AipmClient::submit_tracked(
    const std::string& model_id, std::string payload) {
  std::future<AipmResponse> fut;
  std::uint64_t id;
  {
    std::lock_guard lk(mu_);
    if (closed_) raise(ErrorCode::TransportClosed, "transport is closed");
    id = next_id_++;
    fut = pending_[id].get_future();
  }
  try {
    transport_->send(AipmRequest{id, model_id, std::move(payload)});
  } catch (...) {
    std::lock_guard lk(mu_);
    pending_.erase(id);
    throw;
  }
  return {id, std::move(fut)};
}

AipmResponse AipmClient::roundtrip(const std::string& model_id, std::string payload) {
  auto [id, fut] = submit_tracked(model_id, std::move(payload));
  auto deadline = std::chrono::duration<double>(timeout_secs_);
  if (fut.wait_for(deadline) != std::future_status::ready) {
    {
      std::lock_guard lk(mu_);
      pending_.erase(id);
    }
    raise(ErrorCode::Timeout, "no response from " + model_id + " within " +
                                  std::to_string(timeout_secs_) + " s");
  }
  return fut.get();
}

std::size_t AipmClient::in_flight() const {
  std::lock_guard lk(mu_);
  return pending_.size();
}

void AipmClient::on_response(AipmResponse resp) {
  std::promise<AipmResponse> p;
  {
    std::lock_guard lk(mu_);
    auto it = pending_.find(resp.request_id);
    if (it == pending_.end()) return;  // late reply after timeout, or unknown id
    p = std::move(it->second);
    pending_.erase(it);
  }
  p.set_value(std::move(resp));
}

void AipmClient::on_closed() {
  std::map<std::uint64_t, std::promise<AipmResponse>> dropped;
  {
    std::lock_guard lk(mu_);
    closed_ = true;
    dropped.swap(pending_);
  }
  for (auto& [id, p] : dropped) {
    p.set_exception(std::make_exception_ptr(
        Error(ErrorCode::TransportClosed, "transport closed with request " + std::to_string(id) +
                                              " in flight")));
  }
}

}  // namespace blobgraph
