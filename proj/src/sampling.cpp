#include "paracurv/sampling.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "paracurv/errors.hpp"

namespace paracurv {

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

std::vector<Point> sample_points(const CharteredStructure& s, std::uint64_t seed, int count,
                                 std::span<const Interval> box) {
  if (count < 1) throw DimensionError("sampling: count must be >= 1");
  const int d = s.dim();
  std::vector<Interval> b = s.domain().box;
  if (!box.empty()) {
    if (static_cast<int>(box.size()) != d) throw DimensionError("sampling: box dimension mismatch");
    for (int i = 0; i < d; ++i) {
      b[static_cast<std::size_t>(i)].lo = std::max(b[static_cast<std::size_t>(i)].lo, box[static_cast<std::size_t>(i)].lo);
      b[static_cast<std::size_t>(i)].hi = std::min(b[static_cast<std::size_t>(i)].hi, box[static_cast<std::size_t>(i)].hi);
      if (!(b[static_cast<std::size_t>(i)].lo <= b[static_cast<std::size_t>(i)].hi)) {
        throw SamplingExhausted("sampling: box does not meet the chart domain in coordinate " + std::to_string(i));
      }
    }
  }
  std::mt19937_64 rng(seed);
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(count));
  const long long max_rejects = 100LL * count;
  long long rejects = 0;
  Point p(static_cast<std::size_t>(d));
  while (static_cast<int>(out.size()) < count) {
    for (int i = 0; i < d; ++i) p[static_cast<std::size_t>(i)] = uniform(rng, b[static_cast<std::size_t>(i)].lo, b[static_cast<std::size_t>(i)].hi);
    if (s.domain().guard_margin(p) >= 0.0) {
      out.push_back(p);
    } else if (++rejects > max_rejects) {
      throw SamplingExhausted("sampling: guard rejected " + std::to_string(rejects) + " draws");
    }
  }
  return out;
}

std::mt19937_64 point_stream(std::uint64_t seed, std::size_t index, StreamTag tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index & 0xffffffffu), static_cast<std::uint32_t>(tag)};
  return std::mt19937_64(seq);
}

int worker_count() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw < 1) hw = 1;
  if (const char* env = std::getenv("PARACURV_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) return static_cast<int>(std::min<long>(v, 256));
  }
  return hw;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
  const auto workers = static_cast<std::size_t>(std::max(1, std::min<int>(worker_count(), static_cast<int>(std::max<std::size_t>(count, 1)))));
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::size_t failed_index = count;
  std::exception_ptr failure;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (i < failed_index) {
          failed_index = i;
          failure = std::current_exception();
        }
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace paracurv
