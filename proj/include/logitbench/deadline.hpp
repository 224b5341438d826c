#pragma once

#include <chrono>

namespace logitbench {

// Cooperative per-thread time limit. Long-running loops call check_deadline(),
// which throws Error(timeout) once the innermost active ScopedDeadline expires.
class ScopedDeadline {
 public:
  explicit ScopedDeadline(std::chrono::duration<double> budget);
  ~ScopedDeadline();
  ScopedDeadline(const ScopedDeadline&) = delete;
  ScopedDeadline& operator=(const ScopedDeadline&) = delete;

 private:
  std::chrono::steady_clock::time_point previous_;
  bool had_previous_;
};

void check_deadline();

}  // namespace logitbench
