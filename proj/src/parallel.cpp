#include "mlc/parallel.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

namespace mlc::parallel {

namespace {
int g_default_threads = 0;
}

int max_threads() { return omp_get_max_threads(); }

void set_thread_cap(int n) {
  if (g_default_threads == 0) g_default_threads = omp_get_max_threads();
  omp_set_num_threads(n > 0 ? n : g_default_threads);
}

int apply_env_thread_cap() {
  const char* env = std::getenv("MLC_THREADS");
  if (env == nullptr) return 0;
  try {
    int n = std::stoi(env);
    if (n > 0) {
      set_thread_cap(n);
      return n;
    }
  } catch (const std::exception&) {
  }
  return 0;
}

}  // namespace mlc::parallel
