#pragma once

namespace hlab {

// Applies LAB_THREADS (if set) to the OpenMP runtime. Returns the active thread count.
int configure_threads_from_env();
void set_threads(int n);
int thread_count();

}  // namespace hlab
