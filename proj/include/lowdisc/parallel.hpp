#pragma once

#include <cstddef>
#include <functional>

namespace lowdisc {

// Worker count: hardware concurrency, capped by LOWDISC_THREADS when set.
unsigned thread_count();

// Calls body(i) for i in [0, count). Iterations must write disjoint state.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace lowdisc
