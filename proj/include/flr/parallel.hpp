#pragma once

namespace flr {

// Caps the OpenMP worker count; n <= 0 restores the runtime default.
void set_thread_count(int n);
int thread_count();

// --threads value if positive, else FLR_THREADS, else 0 (runtime default).
int resolve_thread_count(int flag_value);

}  // namespace flr
