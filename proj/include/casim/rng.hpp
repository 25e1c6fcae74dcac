#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace casim {

// Mixing function used to derive sub-stream seeds from one master seed.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Named random streams. The fundamental path must be bit-identical across
// runs that share a seed but differ in agent composition, so every consumer
// gets its own stream derived from (master seed, stream tag, index).
enum class Stream : std::uint64_t {
    fundamental = 1,
    scheduler = 2,
    ga = 3,
    agent = 4,
    campaign = 5,
};

inline std::uint64_t derive_seed(std::uint64_t master, Stream stream, std::uint64_t index = 0) noexcept {
    const std::uint64_t tag = splitmix64(static_cast<std::uint64_t>(stream) * 0x51a9b2c7d3e8f401ULL + 1);
    return splitmix64(splitmix64(master ^ tag) + index);
}

// mt19937_64 core with hand-rolled distributions. The standard pins the
// engine output bit for bit but not the distributions, and identical seeds
// must reproduce identical runs regardless of standard library.
class Rng {
public:
    Rng() : engine_(0xdeadbeefULL) {}
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1).
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Uniform integer in [0, n). Rejection keeps the result unbiased.
    std::uint64_t uniform_int(std::uint64_t n) {
        if (n <= 1) return 0;
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    bool bernoulli(double p) { return uniform01() < p; }

    // Knuth multiplication method; fine for the small rates used here.
    int poisson(double rate) {
        if (rate <= 0.0) return 0;
        const double threshold = std::exp(-rate);
        int k = 0;
        double prod = uniform01();
        while (prod > threshold) {
            ++k;
            prod *= uniform01();
        }
        return k;
    }

    // Standard normal via Box-Muller (no cached spare: keeps state minimal).
    double normal() {
        double u1;
        do {
            u1 = uniform01();
        } while (u1 <= 0.0);
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[static_cast<std::size_t>(uniform_int(i))]);
        }
    }

private:
    std::mt19937_64 engine_;
};

} // namespace casim
