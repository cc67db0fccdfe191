#pragma once

namespace gaussocc {

/// Thread count used by the OpenMP kernels: the value from set_threads(),
/// else the OpenMP default, capped by GAUSSOCC_THREADS when set.
int thread_count();

/// 0 restores the default.
void set_threads(int n);

}  // namespace gaussocc
