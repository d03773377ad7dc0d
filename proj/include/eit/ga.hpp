#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "eit/forward.hpp"
#include "eit/objective.hpp"
#include "eit/recon.hpp"
#include "eit/rng.hpp"

namespace eit {

struct Individual {
    Eigen::VectorXd genome;
    std::optional<ObjectiveValue> eval;

    bool evaluated() const { return eval.has_value(); }
    double fitness() const { return eval->total; }
};

using Population = std::vector<Individual>;

struct GAConfig {
    int population_size = 200;
    int max_generations = 300;
    double crossover_fraction = 0.8;   // probability a parent pair is blended
    double crossover_low = -0.25;      // blend weight range
    double crossover_high = 1.25;
    double mutation_rate = -1.0;       // per-gene probability; < 0 means 1/n_genes
    double mutation_sigma = 0.05;      // stddev relative to (rho_max - rho_min)
    int elite_count = 2;
    double rho_min = 0.2;
    double rho_max = 5.0;
    double stability_tol = 1e-4;       // rel inf-norm change of the best genome
    int stability_window = 20;         // consecutive stable generations to stop
    double objective_tol = 1e-6;
    std::uint64_t rng_seed = 0;
    int n_threads = 0;                 // fitness evaluation workers; 0 = hardware
    int snapshot_interval = 0;         // best-genome snapshots every N generations
    bool record_timing = false;        // keep elapsed_ms at 0 for reproducible files
    bool spread_warm_start = false;    // init population around the seed instead
                                       // of uniform (variant, off by default)
    // invoked after each generation's evaluation; population is read-only
    std::function<void(int generation, const Population&)> observer;
};

void check_config(const GAConfig& config);

// population_size individuals uniform in bounds; the optional seed individual
// is inserted clamped, so elitism preserves a warm start.
Population init_population(const GAConfig& config, int n_genes, Rng& rng,
                           const Individual* seed_individual = nullptr);

// Per-gene Gaussian perturbation with probability mutation_rate, clamped to
// bounds. Always invalidates the fitness cache.
Individual mutate(const Individual& ind, const GAConfig& config, Rng& rng);

// Intermediate blend: per gene, child1 = w*a + (1-w)*b and child2 mirrored,
// w uniform in [crossover_low, crossover_high], clamped to bounds.
std::pair<Individual, Individual> crossover(const Individual& a, const Individual& b,
                                            const GAConfig& config, Rng& rng);

// Tournament of 2 (minimization); ties break toward the lower index.
int select_index(const Population& population, Rng& rng);
std::pair<int, int> select_parents(const Population& population, Rng& rng);

// Generational GA minimizing f(rho) of the given spec. Deterministic in
// (inputs, seed) regardless of evaluation parallelism.
ReconResult run_ga(const Mesh& mesh, const Protocol& protocol, const MeasurementSet& y,
                   const ObjectiveSpec& spec, const GAConfig& config,
                   const Individual* warm_start = nullptr);

}  // namespace eit
