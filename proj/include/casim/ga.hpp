#pragma once

#include <span>
#include <vector>

#include "casim/agents.hpp"
#include "casim/rng.hpp"

namespace casim {

struct Chromosome {
    PredictorCoeffs coeffs{};
    double fitness = 0.0; // forecast error, lower is better
};

struct GAConfig {
    int interval_steps = 50;    // steps between applications
    int eval_window = 50;       // steps of history scored by fitness
    int tournament_k = 2;
    double crossover_rate = 0.7;
    double mutation_rate = 0.1;
    double mutation_sigma = 0.1;

    void validate() const;
};

// One step of shared forecasting history: the inputs an agent would have
// plugged into its predictor at the start of the step, and the price the
// step actually realized.
struct FitnessSample {
    double v_lagged = 0.0;
    double p_ave = 0.0;
    double p_mid = 0.0;
    double realized_p = 0.0;
};

// Mean absolute forecast error over the window. Throws on empty history.
double fitness(const PredictorCoeffs& coeffs, std::span<const FitnessSample> history);

// Same-size next generation: the best chromosome survives in place, the
// rest come from tournament selection, per-gene uniform crossover and
// clipped Gaussian mutation. Requires population size >= 2 and evaluated
// fitness values.
std::vector<Chromosome> evolve(const std::vector<Chromosome>& population, Rng& rng, const GAConfig& config);

} // namespace casim
