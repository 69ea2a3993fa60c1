// parallel.hpp - worker count from FHEOM_NUM_THREADS and a blocking index-parallel loop
#pragma once

#include <cstddef>
#include <functional>

namespace fheom {

// FHEOM_NUM_THREADS if set to a positive integer, else the hardware concurrency (at least 1).
std::size_t worker_count();

// Calls body(i) for i in [0, n). Each index runs exactly once; results must go to disjoint slots.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace fheom
