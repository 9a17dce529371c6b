#include "polydg/parallel.hpp"

namespace polydg {

namespace {
std::atomic<int> g_workers{0};
}

void set_worker_count(int n) { g_workers = std::max(0, n); }

int worker_count() {
  const int n = g_workers.load();
  if (n > 0) return n;
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace polydg
