#pragma once

#include <algorithm>
#include <random>
#include <thread>

#include "blobgraph/common/error.hpp"
#include "blobgraph/extraction/aipm.hpp"

namespace blobgraph::testing {

// Holds requests until `batch` have arrived, then answers all of them in a
// shuffled order from a separate thread.
class ShuffleTransport final : public AipmTransport {
 public:
  ShuffleTransport(std::shared_ptr<const ModelHost> host, std::size_t batch, std::uint64_t seed)
      : host_(std::move(host)), batch_(batch), rng_(seed) {}
  ~ShuffleTransport() override {
    close();
    if (replier_.joinable()) replier_.join();
  }

  void start(ResponseFn on_response, ClosedFn on_closed) override {
    on_response_ = std::move(on_response);
    on_closed_ = std::move(on_closed);
  }

  void send(const AipmRequest& req) override {
    std::vector<AipmRequest> ready;
    {
      std::lock_guard lk(mu_);
      if (closed_) raise(ErrorCode::TransportClosed, "shuffle transport closed");
      held_.push_back(req);
      if (held_.size() < batch_) return;
      ready.swap(held_);
      std::shuffle(ready.begin(), ready.end(), rng_);
      order_.clear();
      for (const auto& r : ready) order_.push_back(r.request_id);
    }
    replier_ = std::thread([this, ready = std::move(ready)] {
      for (const auto& r : ready) on_response_(host_->handle(r));
    });
  }

  void close() override {
    {
      std::lock_guard lk(mu_);
      if (closed_) return;
      closed_ = true;
    }
    if (on_closed_) on_closed_();
  }

  std::vector<std::uint64_t> reply_order() {
    std::lock_guard lk(mu_);
    return order_;
  }

 private:
  std::shared_ptr<const ModelHost> host_;
  std::size_t batch_;
  std::mt19937_64 rng_;
  std::mutex mu_;
  bool closed_ = false;
  std::vector<AipmRequest> held_;
  std::vector<std::uint64_t> order_;
  ResponseFn on_response_;
  ClosedFn on_closed_;
  std::thread replier_;
};

// Accepts requests and never answers.
class SilentTransport final : public AipmTransport {
 public:
  void start(ResponseFn, ClosedFn on_closed) override { on_closed_ = std::move(on_closed); }
  void send(const AipmRequest&) override {
    if (closed_) raise(ErrorCode::TransportClosed, "silent transport closed");
  }
  void close() override {
    if (closed_) return;
    closed_ = true;
    if (on_closed_) on_closed_();
  }

 private:
  bool closed_ = false;
  ClosedFn on_closed_;
};

}  // namespace blobgraph::testing
