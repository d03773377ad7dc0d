#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>

#include "eit/forward.hpp"
#include "eit/ga.hpp"
#include "eit/objective.hpp"
#include "eit/recon.hpp"

namespace eit {

// Damped regularized Gauss-Newton (Levenberg schedule). Minimizes the
// squared-form objective ||y - h(rho)||^2 + alpha * Psi(rho).
struct NRConfig {
    int max_iterations = 50;
    double lambda0 = 1e-2;
    double lambda_up = 10.0;    // on reject
    double lambda_down = 0.1;   // on accept
    int max_rejects = 15;       // lambda escalations per outer iteration
    double step_tol = 1e-6;     // relative inf-norm of the accepted step
    double residual_tol = 0.0;  // data misfit relative to ||y||; 0 disables
    double alpha = 1e-4;        // regularization weight of the internal objective
    bool line_search = false;   // halve the step before escalating lambda
    bool one_step = false;      // single Gauss-Newton update, EIDORS style
    double positivity_floor = 1e-6;
    bool record_timing = false;
};

struct NrStepResult {
    Eigen::VectorXd rho_next;
    bool accepted = false;
    Eigen::VectorXd delta;      // solved update before clamping
    double f_candidate = 0.0;   // squared-form objective at rho_next
    double f_current = 0.0;
};

// One damped step at fixed lambda: solves
//   (J'J + alpha L'L + lambda I) delta = J'(y - h) - alpha L'L (rho - rho_ref)
// and accepts iff the squared-form objective decreases. spec.alpha is the
// regularization weight; the data norm is forced to the squared form.
NrStepResult nr_step(const ResistivityField& rho, const MeasurementSet& y, const Mesh& mesh,
                     const Protocol& protocol, const ObjectiveSpec& spec, double lambda);

// Iterates damped steps from rho0. The trace logs the squared-form objective
// the method minimizes; final_objective reports the caller's spec.
ReconResult run_nr(const Mesh& mesh, const Protocol& protocol, const MeasurementSet& y,
                   const ObjectiveSpec& spec, const NRConfig& config,
                   const ResistivityField& rho0);

// Multiplicative log-normal perturbation rho * exp(sigma * N(0,1)) per element.
struct DisturbanceSpec {
    double sigma = 0.2;
    std::uint64_t seed = 0;
};

Eigen::VectorXd disturb_field(const Eigen::VectorXd& rho, const DisturbanceSpec& spec);

// NR from a homogeneous start, optional disturbance of the estimate, then GA
// warm-started from it. Trace rows carry stage markers nr | disturb | ga.
ReconResult run_hybrid(const Mesh& mesh, const Protocol& protocol, const MeasurementSet& y,
                       const ObjectiveSpec& spec, const NRConfig& nr_config,
                       const GAConfig& ga_config,
                       const std::optional<DisturbanceSpec>& disturbance);

}  // namespace eit
