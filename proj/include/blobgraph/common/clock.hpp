#pragma once

#include <atomic>
#include <chrono>

namespace blobgraph {

// Time source for cost feedback. Real execution uses SteadyClock; tests that
// simulate expensive work advance a ManualClock instead of sleeping.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual double now_secs() const = 0;
};

class SteadyClock final : public Clock {
 public:
  double now_secs() const override {
    using namespace std::chrono;
    return duration<double>(steady_clock::now().time_since_epoch()).count();
  }
};

class ManualClock final : public Clock {
 public:
  double now_secs() const override { return micros_.load() * 1e-6; }
  void advance(double secs) { micros_.fetch_add(static_cast<long long>(secs * 1e6 + 0.5)); }

 private:
  std::atomic<long long> micros_{0};
};

}  // namespace blobgraph
