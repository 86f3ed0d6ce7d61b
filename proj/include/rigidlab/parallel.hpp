#pragma once

#include <cstddef>
#include <functional>

namespace rigidlab {

/// Number of worker threads used by parallel sweeps (defaults to hardware concurrency).
void set_thread_count(unsigned n);
unsigned thread_count();

/// Run body(i) for i in [0, n). Each index must write only its own output slot,
/// so results do not depend on the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace rigidlab
