#pragma once

#include <functional>

namespace hmt {

// Worker count: THREADS env var if set to a positive integer, else hardware concurrency.
int worker_count();

// Runs body(i) for i in [0, n). Each index is handled by exactly one worker, so
// results written per-index do not depend on the worker count.
void parallel_for(int n, const std::function<void(int)>& body);

}  // namespace hmt
