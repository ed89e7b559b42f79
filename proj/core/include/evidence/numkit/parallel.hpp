#pragma once

#include <cstddef>
#include <functional>

namespace evidence::numkit {

// Runs fn(0) ... fn(n-1) on up to `jobs` threads. Each index runs exactly
// once; callers write results into per-index slots so reduction order is
// independent of scheduling. The first exception thrown is rethrown after
// all workers join.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn);

// Worker count from EVIDENCE_JOBS, falling back to 1.
std::size_t default_jobs();

}  // namespace evidence::numkit
