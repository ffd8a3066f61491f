#pragma once

#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace levylab {

/// Worker count resolution: explicit value, else LEVYLAB_WORKERS, else the
/// hardware concurrency.
int resolve_workers(int requested = 0);

/// Runs fn(i) for i in [0, n) across `workers` threads with a static block
/// partition. Results must be written to per-index slots; combined with
/// pairwise_sum below this keeps every reduction independent of the worker
/// count.
void parallel_for(std::int64_t n, int workers, const std::function<void(std::int64_t)>& fn);

/// Pairwise (tree) summation in index order; deterministic and more
/// accurate than a running sum.
template <class Get>
double pairwise_sum(std::int64_t lo, std::int64_t hi, Get&& get) {
    const std::int64_t n = hi - lo;
    if (n <= 0) return 0.0;
    if (n <= 8) {
        double s = 0.0;
        for (std::int64_t i = lo; i < hi; ++i) s += get(i);
        return s;
    }
    const std::int64_t mid = lo + n / 2;
    return pairwise_sum(lo, mid, get) + pairwise_sum(mid, hi, get);
}

template <class Vec>
double pairwise_sum(const Vec& values) {
    return pairwise_sum(0, static_cast<std::int64_t>(values.size()),
                        [&](std::int64_t i) { return values[i]; });
}

}  // namespace levylab
