#pragma once

// Seeded sampling. Points come from one sequential std::mt19937_64 stream so
// the sample set depends only on the seed; per-point random vectors come from
// independent streams keyed by (seed, point index, tag), which keeps results
// identical under any thread count.
//
// Doubles use the top 53 bits of each 64-bit draw: (x >> 11) * 2^-53, mapped
// affinely onto the target interval.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "paracurv/geometry.hpp"

namespace paracurv {

using Point = std::vector<double>;

double uniform01(std::mt19937_64& rng);
double uniform(std::mt19937_64& rng, double lo, double hi);

/// `count` points inside box ∩ guard. `box` overrides the structure's own
/// box when non-empty (it is intersected with it). SamplingExhausted after
/// 100·count rejected draws.
std::vector<Point> sample_points(const CharteredStructure& s, std::uint64_t seed, int count,
                                 std::span<const Interval> box = {});

enum class StreamTag : std::uint32_t {
  xi_sectional = 1,
  phsc = 2,
  wpc = 3,
  sections = 4,
  misc = 5,
};

std::mt19937_64 point_stream(std::uint64_t seed, std::size_t index, StreamTag tag);

/// Worker count: PARACURV_THREADS if set (>= 1), else hardware concurrency.
int worker_count();

/// Runs fn(i) for i in [0, count) across worker_count() threads. If any call
/// throws, the exception of the lowest failing index is rethrown after all
/// workers finish.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace paracurv
