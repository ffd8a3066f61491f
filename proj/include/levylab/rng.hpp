#pragma once

#include <cmath>
#include <cstdint>

namespace levylab {

namespace rng_detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace rng_detail

/// xoshiro256++ stream. Streams are derived counter-style from
/// (seed, stream_index), so sample i is identical for every worker count.
class RngStream {
  public:
    RngStream() : RngStream(0, 0) {}
    RngStream(std::uint64_t seed, std::uint64_t stream_index) {
        std::uint64_t mix = seed ^ (0xD1B54A32D192ED03ULL * (stream_index + 0x632BE59BD9B4E019ULL));
        for (auto& word : s_) word = rng_detail::splitmix64(mix);
        if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rng_detail::rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rng_detail::rotl(s_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in (0, 1] (safe as a log argument).
    double uniform_pos() { return 1.0 - uniform(); }

    /// Standard normal via Box-Muller (consumes two uniforms per call).
    double normal() {
        const double u1 = uniform_pos();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    /// Poisson draw; inversion for small means, Hormann's PTRD otherwise.
    std::uint64_t poisson(double mean);

  private:
    std::uint64_t s_[4];
};

inline RngStream make_stream(std::uint64_t seed, std::uint64_t stream_index) {
    return RngStream(seed, stream_index);
}

inline std::uint64_t RngStream::poisson(double mean) {
    if (mean <= 0.0) return 0;
    if (mean < 10.0) {
        // Knuth inversion in the log domain is unnecessary at this size.
        const double l = std::exp(-mean);
        std::uint64_t k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= uniform_pos();
        } while (p > l);
        return k - 1;
    }
    // PTRD (Hormann 1993): transformed rejection with squeeze.
    const double smu = std::sqrt(mean);
    const double b = 0.931 + 2.53 * smu;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    while (true) {
        double u = uniform() - 0.5;
        double v = uniform_pos();
        const double us = 0.5 - std::abs(u);
        const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= v_r) return static_cast<std::uint64_t>(kf);
        if (kf < 0.0 || (us < 0.013 && v > us)) continue;
        const double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
        const double rhs = kf * std::log(mean) - mean - std::lgamma(kf + 1.0);
        if (lhs <= rhs) return static_cast<std::uint64_t>(kf);
    }
}

}  // namespace levylab
