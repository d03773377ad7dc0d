#include "eit/ga.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "eit/errors.hpp"

namespace eit {

namespace {

double clamp_gene(double v, const GAConfig& c) { return std::clamp(v, c.rho_min, c.rho_max); }

double mutation_probability(const GAConfig& c, Eigen::Index n_genes) {
    return c.mutation_rate >= 0.0 ? c.mutation_rate : 1.0 / static_cast<double>(n_genes);
}

// Runs fn(i) for i in [0, n) on up to n_threads workers. Each index writes to
// its own slot, so the result does not depend on scheduling.
void parallel_for(int n, int n_threads, const std::function<void(int)>& fn) {
    if (n_threads <= 0) {
        n_threads = static_cast<int>(std::thread::hardware_concurrency());
        if (n_threads <= 0) n_threads = 1;
    }
    n_threads = std::min(n_threads, n);
    if (n_threads <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&]() {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> threads;
    threads.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace

void check_config(const GAConfig& c) {
    if (c.population_size < 1) throw ConfigError("population_size must be >= 1");
    if (c.max_generations < 0) throw ConfigError("max_generations must be >= 0");
    if (!(c.rho_min > 0.0) || !(c.rho_max >= c.rho_min)) {
        throw ConfigError("bounds must satisfy 0 < rho_min <= rho_max");
    }
    if (c.elite_count < 1 || c.elite_count >= c.population_size + 1) {
        throw ConfigError("elite_count must be in [1, population_size]");
    }
    if (c.crossover_fraction < 0.0 || c.crossover_fraction > 1.0) {
        throw ConfigError("crossover_fraction must be in [0, 1]");
    }
    if (!(c.stability_tol > 0.0) || !(c.objective_tol > 0.0)) {
        throw ConfigError("tolerances must be > 0");
    }
    if (c.stability_window < 1) throw ConfigError("stability_window must be >= 1");
    if (c.mutation_sigma < 0.0) throw ConfigError("mutation_sigma must be >= 0");
}

Population init_population(const GAConfig& config, int n_genes, Rng& rng,
                           const Individual* seed_individual) {
    check_config(config);
    Population pop;
    pop.reserve(config.population_size);
    for (int i = 0; i < config.population_size; ++i) {
        Individual ind;
        ind.genome.resize(n_genes);
        if (seed_individual != nullptr && config.spread_warm_start && i > 0) {
            // variant: log-normal cloud around the seed
            for (int g = 0; g < n_genes; ++g) {
                ind.genome[g] =
                    clamp_gene(seed_individual->genome[g] * std::exp(0.1 * rng.normal()), config);
            }
        } else {
            for (int g = 0; g < n_genes; ++g) {
                ind.genome[g] = rng.uniform(config.rho_min, config.rho_max);
            }
        }
        pop.push_back(std::move(ind));
    }
    if (seed_individual != nullptr) {
        Individual seeded = *seed_individual;
        if (seeded.genome.size() != n_genes) {
            throw ConfigError("warm-start genome has wrong length");
        }
        bool clamped = false;
        for (int g = 0; g < n_genes; ++g) {
            const double v = clamp_gene(seeded.genome[g], config);
            if (v != seeded.genome[g]) clamped = true;
            seeded.genome[g] = v;
        }
        if (clamped) seeded.eval.reset();
        pop[0] = std::move(seeded);
    }
    return pop;
}

Individual mutate(const Individual& ind, const GAConfig& config, Rng& rng) {
    Individual out;
    out.genome = ind.genome;
    const double p = mutation_probability(config, ind.genome.size());
    const double sigma = config.mutation_sigma * (config.rho_max - config.rho_min);
    for (Eigen::Index g = 0; g < out.genome.size(); ++g) {
        if (rng.uniform() < p) {
            out.genome[g] = clamp_gene(out.genome[g] + sigma * rng.normal(), config);
        }
    }
    return out;  // fitness cache deliberately unset
}

std::pair<Individual, Individual> crossover(const Individual& a, const Individual& b,
                                            const GAConfig& config, Rng& rng) {
    if (a.genome.size() != b.genome.size()) {
        throw ConfigError("crossover parents have different genome lengths");
    }
    Individual c1, c2;
    c1.genome.resize(a.genome.size());
    c2.genome.resize(a.genome.size());
    for (Eigen::Index g = 0; g < a.genome.size(); ++g) {
        const double w = rng.uniform(config.crossover_low, config.crossover_high);
        c1.genome[g] = clamp_gene(w * a.genome[g] + (1.0 - w) * b.genome[g], config);
        c2.genome[g] = clamp_gene((1.0 - w) * a.genome[g] + w * b.genome[g], config);
    }
    return {std::move(c1), std::move(c2)};
}

int select_index(const Population& population, Rng& rng) {
    if (population.empty()) throw ConfigError("selection from an empty population");
    const auto n = static_cast<std::uint64_t>(population.size());
    const int i = static_cast<int>(rng.uniform_index(n));
    const int j = static_cast<int>(rng.uniform_index(n));
    for (int k : {i, j}) {
        if (!population[k].evaluated()) {
            throw NumericalError("tournament selection on unevaluated individual");
        }
    }
    const double fi = population[i].fitness(), fj = population[j].fitness();
    if (fi < fj) return i;
    if (fj < fi) return j;
    return std::min(i, j);
}

std::pair<int, int> select_parents(const Population& population, Rng& rng) {
    const int a = select_index(population, rng);
    const int b = select_index(population, rng);
    return {a, b};
}

ReconResult run_ga(const Mesh& mesh, const Protocol& protocol, const MeasurementSet& y,
                   const ObjectiveSpec& spec, const GAConfig& config,
                   const Individual* warm_start) {
    check_config(config);
    const ObjectiveEvaluator evaluator(mesh, protocol, y, spec);
    const int n_genes = mesh.n_elements();

    ReconResult result;
    const auto t_start = std::chrono::steady_clock::now();
    auto elapsed_ms = [&]() {
        if (!config.record_timing) return 0.0;
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                         t_start)
            .count();
    };

    Rng rng(config.rng_seed);
    Population pop = init_population(config, n_genes, rng, warm_start);

    auto evaluate_population = [&](Population& p) {
        std::vector<int> todo;
        for (int i = 0; i < static_cast<int>(p.size()); ++i) {
            if (!p[i].evaluated()) todo.push_back(i);
        }
        parallel_for(static_cast<int>(todo.size()), config.n_threads,
                     [&](int k) { p[todo[k]].eval = evaluator.evaluate(p[todo[k]].genome); });
        result.forward_solve_count += todo.size();
    };

    // index of the best individual; ties toward the lower index
    auto best_index = [](const Population& p) {
        int best = 0;
        for (int i = 1; i < static_cast<int>(p.size()); ++i) {
            if (p[i].fitness() < p[best].fitness()) best = i;
        }
        return best;
    };

    int stable_streak = 0;
    Eigen::VectorXd prev_best_genome;
    std::string reason = "budget";
    int generation = 0;

    for (;; ++generation) {
        evaluate_population(pop);

        const int best = best_index(pop);
        double mean = 0.0;
        for (const Individual& ind : pop) mean += ind.fitness();
        mean /= static_cast<double>(pop.size());

        result.trace.push_back({"ga", generation, *pop[best].eval, mean,
                                result.forward_solve_count, elapsed_ms()});
        if (config.snapshot_interval > 0 && generation % config.snapshot_interval == 0) {
            result.genome_snapshots.emplace_back(generation, pop[best].genome);
        }
        if (config.observer) config.observer(generation, pop);

        if (pop[best].fitness() < config.objective_tol) {
            reason = "objective";
            break;
        }
        if (prev_best_genome.size() > 0) {
            const double denom = prev_best_genome.lpNorm<Eigen::Infinity>();
            const double change =
                (pop[best].genome - prev_best_genome).lpNorm<Eigen::Infinity>();
            if (denom > 0.0 && change / denom < config.stability_tol) {
                ++stable_streak;
            } else {
                stable_streak = 0;
            }
            if (stable_streak >= config.stability_window) {
                reason = "stability";
                break;
            }
        }
        prev_best_genome = pop[best].genome;
        if (generation >= config.max_generations) {
            reason = "budget";
            break;
        }

        // next generation: elites survive with their cached fitness
        Population next;
        next.reserve(pop.size());
        std::vector<int> order(pop.size());
        for (std::size_t i = 0; i < pop.size(); ++i) order[i] = static_cast<int>(i);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return pop[a].fitness() < pop[b].fitness(); });
        for (int e = 0; e < config.elite_count && e < static_cast<int>(pop.size()); ++e) {
            next.push_back(pop[order[e]]);
        }
        while (next.size() < pop.size()) {
            const auto [ia, ib] = select_parents(pop, rng);
            Individual c1, c2;
            if (rng.uniform() < config.crossover_fraction) {
                std::tie(c1, c2) = crossover(pop[ia], pop[ib], config, rng);
            } else {
                c1.genome = pop[ia].genome;
                c2.genome = pop[ib].genome;
            }
            next.push_back(mutate(c1, config, rng));
            if (next.size() < pop.size()) next.push_back(mutate(c2, config, rng));
        }
        pop = std::move(next);
    }

    const int best = best_index(pop);
    result.rho_est = pop[best].genome;
    result.final_objective = *pop[best].eval;
    result.termination_reason = reason;
    result.wall_time_ms = elapsed_ms();
    return result;
}

}  // namespace eit
