#ifndef ZSB_PARALLEL_HPP
#define ZSB_PARALLEL_HPP

#include <functional>

namespace zsb {

/// Worker count: min(hardware_concurrency, ZSB_THREADS if set). At least 1.
int thread_count();

/**
 * Runs body(i) for i in [0, n) on the worker pool. Each index is executed
 * exactly once; results must be written to preassigned slots so output does
 * not depend on scheduling. Exceptions are captured and rethrown (first one
 * in index order).
 */
void parallel_for(int n, const std::function<void(int)>& body);

} // namespace zsb

#endif
