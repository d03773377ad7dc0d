#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "eit/objective.hpp"

namespace eit {

// One generation (GA) or outer iteration (Gauss-Newton) of a reconstruction.
struct TraceRow {
    std::string stage;  // "ga" | "nr" | "disturb"
    int generation = 0;
    ObjectiveValue best;
    double mean_fitness = 0.0;
    std::uint64_t forward_solves = 0;  // cumulative
    double elapsed_ms = 0.0;           // stays 0 unless timing is recorded
};

struct ReconResult {
    Eigen::VectorXd rho_est;
    std::vector<TraceRow> trace;
    std::string termination_reason;  // "objective" | "stability" | "budget" | "step_tol" | ...
    std::uint64_t forward_solve_count = 0;
    std::uint64_t jacobian_count = 0;
    double wall_time_ms = 0.0;  // stays 0 unless timing is recorded
    ObjectiveValue final_objective;
    std::vector<std::pair<int, Eigen::VectorXd>> genome_snapshots;
};

}  // namespace eit
