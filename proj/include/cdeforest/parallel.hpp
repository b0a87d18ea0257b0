#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>

namespace cdeforest {

using Rng = std::mt19937_64;

/// Worker count from CDE_FOREST_THREADS (0 or unset = hardware concurrency).
std::size_t thread_count();

/// Runs body(i) for i in [0, n) over up to thread_count() workers. Work is
/// handed out dynamically, so body must not depend on execution order.
/// The first exception thrown by any body is rethrown on the caller.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Seed of an independent stream identified by (seed, stream).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace cdeforest
