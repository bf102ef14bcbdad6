#pragma once

namespace figkit {

/// Worker threads used by the parallel kernels: an explicit override if one
/// was set, else the FIGKIT_THREADS environment variable, else the OpenMP
/// default. Always >= 1; always 1 in builds without OpenMP.
int thread_count();

/// Overrides the thread count for subsequent kernels; n <= 0 clears it.
void set_thread_count(int n);

}  // namespace figkit
