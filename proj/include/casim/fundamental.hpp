#pragma once

#include <cstdint>
#include <vector>

#include "casim/rng.hpp"

namespace casim {

struct FundamentalConfig {
    double v0 = 20.0;
    double tick = 0.01;      // delta: jump sizes are drawn from (-tick, tick)
    double jump_rate = 4.0;  // phi: Poisson rate of jumps per step
    // Two-point {-tick, +tick} jumps instead of the continuous-uniform
    // reading, for sensitivity checks.
    bool discrete_jumps = false;
};

struct FundamentalPath {
    std::vector<double> v; // length T+1, v[0] = v0
    std::int64_t clamped = 0; // steps where the value had to be floored at one tick
};

// One move of the compound Poisson jump process:
// v' = v + sum of N iid jumps, N ~ Poisson(jump_rate).
// A non-positive result is clamped to one tick and counted via `clamped`.
double step_fundamental(double v, const FundamentalConfig& cfg, Rng& rng, std::int64_t* clamped = nullptr);

FundamentalPath generate_path(const FundamentalConfig& cfg, std::int64_t steps, Rng& rng);

} // namespace casim
