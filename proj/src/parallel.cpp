#include "hlab/parallel.hpp"

#include <omp.h>

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace hlab {

int configure_threads_from_env() {
  if (const char* env = std::getenv("LAB_THREADS")) {
    int n = 0;
    try {
      n = std::stoi(env);
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string("LAB_THREADS is not an integer: ") + env);
    }
    if (n < 1) throw std::invalid_argument("LAB_THREADS must be positive");
    set_threads(n);
  }
  return thread_count();
}

void set_threads(int n) { omp_set_num_threads(n); }

int thread_count() { return omp_get_max_threads(); }

}  // namespace hlab
