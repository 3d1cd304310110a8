#pragma once

#include <cstddef>
#include <functional>

namespace multirank {

// Runs fn(i) for every i in [0, n), on up to `threads` workers. Callers must
// write results into index-owned slots; together with ordered reduction on
// the caller side this keeps output independent of scheduling.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace multirank
