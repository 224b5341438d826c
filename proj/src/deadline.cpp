#include "logitbench/deadline.hpp"

#include "logitbench/error.hpp"

namespace logitbench {
namespace {

thread_local bool t_active = false;
thread_local std::chrono::steady_clock::time_point t_deadline;

}  // namespace

ScopedDeadline::ScopedDeadline(std::chrono::duration<double> budget)
    : previous_(t_deadline), had_previous_(t_active) {
  auto until = std::chrono::steady_clock::now() +
               std::chrono::duration_cast<std::chrono::steady_clock::duration>(budget);
  if (!t_active || until < t_deadline) t_deadline = until;
  t_active = true;
}

ScopedDeadline::~ScopedDeadline() {
  t_deadline = previous_;
  t_active = had_previous_;
}

void check_deadline() {
  if (t_active && std::chrono::steady_clock::now() > t_deadline)
    throw Error(ErrorCode::timeout, "fit exceeded its time budget");
}

}  // namespace logitbench
