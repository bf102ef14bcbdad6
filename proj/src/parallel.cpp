#include "figkit/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace figkit {

namespace {
std::atomic<int> g_override{0};

int env_threads() {
  const char* env = std::getenv("FIGKIT_THREADS");
  if (!env || !*env) return 0;
  try {
    return std::stoi(env);
  } catch (...) {
    return 0;
  }
}
}  // namespace

int thread_count() {
#ifdef _OPENMP
  if (int n = g_override.load(); n > 0) return n;
  if (int n = env_threads(); n > 0) return n;
  return omp_get_max_threads() > 0 ? omp_get_max_threads() : 1;
#else
  return 1;
#endif
}

void set_thread_count(int n) { g_override.store(n > 0 ? n : 0); }

}  // namespace figkit
