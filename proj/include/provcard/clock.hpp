#pragma once

#include <atomic>
#include <chrono>

#include "provcard/card.hpp"

namespace provcard {

class Clock {
 public:
  virtual ~Clock() = default;
  virtual Timestamp now() = 0;
};

class SystemClock : public Clock {
 public:
  Timestamp now() override {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
  }
};

/// Starts at a fixed instant and advances one second per reading, so replays
/// produce identical timestamps.
class LogicalClock : public Clock {
 public:
  explicit LogicalClock(Timestamp start = 1'700'000'000'000) : next_(start) {}
  Timestamp now() override { return next_.fetch_add(1000); }

 private:
  std::atomic<Timestamp> next_;
};

}  // namespace provcard
