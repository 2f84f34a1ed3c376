#pragma once

// Thin wrapper around the OpenMP runtime. Every parallel kernel in the library
// produces results that do not depend on the thread count; the cap only
// changes wall-clock time.

namespace mlc::parallel {

int max_threads();

// Caps the number of OpenMP threads. n <= 0 restores the runtime default.
void set_thread_cap(int n);

// Reads MLC_THREADS from the environment and applies it if set and positive.
// Returns the cap that was applied, or 0 when the variable is absent.
int apply_env_thread_cap();

}  // namespace mlc::parallel
