#pragma once

#include <cstddef>
#include <functional>

namespace coarse {

/// Number of worker threads; honours COARSE_SPECTRA_THREADS when set.
std::size_t worker_count();

/// Runs body(i) for i in [0, n). Each index is visited exactly once; the
/// body must only write to per-index state so results do not depend on
/// scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace coarse
