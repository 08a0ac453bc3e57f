#include "herdlab/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace herdlab::par {

namespace {
std::atomic<int> g_default_jobs{0};

int env_jobs() {
  const char* v = std::getenv("HERDLAB_JOBS");
  if (!v || !*v) return 0;
  try {
    int n = std::stoi(v);
    return n > 0 ? n : 0;
  } catch (...) {
    return 0;
  }
}
}  // namespace

bool openmp_enabled() {
#ifdef _OPENMP
  return true;
#else
  return false;
#endif
}

int hardware_jobs() {
  unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : int(n);
}

int default_jobs() {
  int j = g_default_jobs.load();
  if (j > 0) return j;
  int e = env_jobs();
  return e > 0 ? e : hardware_jobs();
}

void set_default_jobs(int jobs) { g_default_jobs.store(jobs > 0 ? jobs : 0); }

int resolve(int requested) { return requested > 0 ? requested : default_jobs(); }

void for_each(std::size_t n, int jobs, const std::function<void(std::size_t)>& body) {
  const int j = resolve(jobs);
  if (j <= 1 || n <= 1) {
    for_each_serial(n, body);
    return;
  }
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(j)
  for (long long i = 0; i < (long long)n; ++i) body(std::size_t(i));
#else
  for_each_serial(n, body);
#endif
}

void for_each_serial(std::size_t n, const std::function<void(std::size_t)>& body) {
  for (std::size_t i = 0; i < n; ++i) body(i);
}

}  // namespace herdlab::par
