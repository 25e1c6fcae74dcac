#include "casim/fundamental.hpp"

#include <stdexcept>

namespace casim {

double step_fundamental(double v, const FundamentalConfig& cfg, Rng& rng, std::int64_t* clamped) {
    if (v <= 0.0) throw std::invalid_argument("fundamental value must be positive");
    const int jumps = rng.poisson(cfg.jump_rate);
    double next = v;
    for (int k = 0; k < jumps; ++k) {
        if (cfg.discrete_jumps) {
            next += rng.bernoulli(0.5) ? cfg.tick : -cfg.tick;
        } else {
            next += rng.uniform(-cfg.tick, cfg.tick);
        }
    }
    if (next <= 0.0) {
        next = cfg.tick;
        if (clamped) ++*clamped;
    }
    return next;
}

FundamentalPath generate_path(const FundamentalConfig& cfg, std::int64_t steps, Rng& rng) {
    if (steps < 0) throw std::invalid_argument("steps must be non-negative");
    FundamentalPath path;
    path.v.reserve(static_cast<std::size_t>(steps) + 1);
    path.v.push_back(cfg.v0);
    for (std::int64_t t = 0; t < steps; ++t) {
        path.v.push_back(step_fundamental(path.v.back(), cfg, rng, &path.clamped));
    }
    return path;
}

} // namespace casim
