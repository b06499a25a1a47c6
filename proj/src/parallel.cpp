#include "flr/parallel.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

namespace flr {

namespace {
int g_default_threads = 0;
}

void set_thread_count(int n) {
  if (g_default_threads == 0) g_default_threads = omp_get_max_threads();
  omp_set_num_threads(n > 0 ? n : g_default_threads);
}

int thread_count() { return omp_get_max_threads(); }

int resolve_thread_count(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("FLR_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v > 0) return v;
    } catch (const std::exception&) {
    }
  }
  return 0;
}

}  // namespace flr
