#include "casim/ga.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace casim {

void GAConfig::validate() const {
    if (interval_steps < 1) throw std::invalid_argument("GA interval must be >= 1");
    if (eval_window < 1) throw std::invalid_argument("GA eval window must be >= 1");
    if (tournament_k < 2) throw std::invalid_argument("GA tournament size must be >= 2");
    auto rate_ok = [](double r) { return r >= 0.0 && r <= 1.0; };
    if (!rate_ok(crossover_rate) || !rate_ok(mutation_rate)) {
        throw std::invalid_argument("GA rates must lie in [0,1]");
    }
    if (mutation_sigma < 0.0) throw std::invalid_argument("GA mutation sigma must be >= 0");
}

double fitness(const PredictorCoeffs& coeffs, std::span<const FitnessSample> history) {
    if (history.empty()) throw std::invalid_argument("fitness needs at least one sample");
    const double sum_w = coeffs.a + coeffs.b + coeffs.c;
    if (sum_w <= 0.0) throw std::invalid_argument("predictor coefficients must not all be zero");
    double total = 0.0;
    for (const FitnessSample& s : history) {
        const double forecast = (coeffs.a * s.v_lagged + coeffs.b * s.p_ave + coeffs.c * s.p_mid) / sum_w;
        total += std::abs(forecast - s.realized_p);
    }
    return total / static_cast<double>(history.size());
}

namespace {

std::size_t tournament(const std::vector<Chromosome>& pop, Rng& rng, int k) {
    std::size_t best = static_cast<std::size_t>(rng.uniform_int(pop.size()));
    for (int i = 1; i < k; ++i) {
        const std::size_t challenger = static_cast<std::size_t>(rng.uniform_int(pop.size()));
        if (pop[challenger].fitness < pop[best].fitness) best = challenger;
    }
    return best;
}

double clip01(double x) { return std::clamp(x, 0.0, 1.0); }

void mutate_gene(double& gene, Rng& rng, const GAConfig& cfg) {
    if (rng.uniform01() < cfg.mutation_rate) {
        gene = clip01(gene + rng.normal() * cfg.mutation_sigma);
    }
}

} // namespace

std::vector<Chromosome> evolve(const std::vector<Chromosome>& population, Rng& rng, const GAConfig& config) {
    config.validate();
    if (population.size() < 2) throw std::invalid_argument("GA population must have at least 2 chromosomes");

    std::size_t elite = 0;
    for (std::size_t i = 1; i < population.size(); ++i) {
        if (population[i].fitness < population[elite].fitness) elite = i;
    }

    std::vector<Chromosome> next(population.size());
    next[elite] = population[elite];

    for (std::size_t i = 0; i < population.size(); ++i) {
        if (i == elite) continue;
        const Chromosome& p1 = population[tournament(population, rng, config.tournament_k)];
        const Chromosome& p2 = population[tournament(population, rng, config.tournament_k)];

        Chromosome child = p1;
        if (rng.uniform01() < config.crossover_rate) child.coeffs.a = p2.coeffs.a;
        if (rng.uniform01() < config.crossover_rate) child.coeffs.b = p2.coeffs.b;
        if (rng.uniform01() < config.crossover_rate) child.coeffs.c = p2.coeffs.c;

        mutate_gene(child.coeffs.a, rng, config);
        mutate_gene(child.coeffs.b, rng, config);
        mutate_gene(child.coeffs.c, rng, config);

        // Clipping can zero out every gene; an all-zero predictor is invalid.
        if (child.coeffs.a + child.coeffs.b + child.coeffs.c <= 0.0) {
            child.coeffs = random_coeffs(rng);
        }
        next[i] = child;
    }
    return next;
}

} // namespace casim
