// SPDX-License-Identifier: Apache-2.0

#include "ldc/solver_stats.hpp"

#include <atomic>
#include <mutex>

namespace ldc::solver_stats {

namespace {

#ifdef NDEBUG
std::atomic<bool> g_checking{false};
#else
std::atomic<bool> g_checking{true};
#endif
std::mutex g_mutex;
double g_max_residual = 0.0;
long g_count = 0;

}  // namespace

void enable_checking(bool on) { g_checking = on; }
bool checking() { return g_checking; }

void record_solve(double relative_residual) {
  std::lock_guard lock(g_mutex);
  if (relative_residual > g_max_residual) g_max_residual = relative_residual;
  ++g_count;
}

double max_solve_residual() {
  std::lock_guard lock(g_mutex);
  return g_max_residual;
}

long solve_count() {
  std::lock_guard lock(g_mutex);
  return g_count;
}

void reset() {
  std::lock_guard lock(g_mutex);
  g_max_residual = 0.0;
  g_count = 0;
}

}  // namespace ldc::solver_stats
