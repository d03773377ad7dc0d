#include "eit/newton.hpp"

#include <chrono>
#include <cmath>
#include <string>
#include <utility>

#include "eit/errors.hpp"
#include "eit/rng.hpp"

namespace eit {

namespace {

struct GnContext {
    ObjectiveEvaluator evaluator;  // squared data norm, spec.alpha as weight
    Eigen::MatrixXd reg;           // alpha * L'L (dense; n_elements is small)

    GnContext(const Mesh& mesh, const Protocol& protocol, const MeasurementSet& y,
              ObjectiveSpec spec)
        : evaluator(mesh, protocol, y,
                    [&spec] {
                        ObjectiveSpec s = spec;
                        s.data_norm = DataNorm::L2Squared;
                        return s;
                    }()) {
        const int n = mesh.n_elements();
        if (evaluator.spec().regularizer == Regularizer::TikhonovSmoothness) {
            const auto& op = evaluator.smoothness_op();
            reg = evaluator.spec().alpha * Eigen::MatrixXd(op.transpose() * op);
        } else {
            reg = evaluator.spec().alpha * Eigen::MatrixXd::Identity(n, n);
        }
    }

    // solve the damped normal equations for the update
    Eigen::VectorXd solve_delta(const Eigen::MatrixXd& jac, const Eigen::VectorXd& residual,
                                const ResistivityField& rho, double lambda) const {
        const Eigen::VectorXd grad_reg = reg * (rho - evaluator.rho_ref());
        Eigen::MatrixXd system = jac.transpose() * jac + reg;
        system.diagonal().array() += lambda;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(system);
        if (ldlt.info() != Eigen::Success) {
            throw NumericalError("Gauss-Newton system factorization failed at lambda=" +
                                 std::to_string(lambda));
        }
        const Eigen::VectorXd delta = ldlt.solve(jac.transpose() * residual - grad_reg);
        if (!delta.allFinite()) {
            throw NumericalError("Gauss-Newton step is not finite at lambda=" +
                                 std::to_string(lambda));
        }
        return delta;
    }
};

Eigen::VectorXd clamp_floor(Eigen::VectorXd rho, double floor) {
    for (Eigen::Index i = 0; i < rho.size(); ++i) rho[i] = std::max(rho[i], floor);
    return rho;
}

}  // namespace

NrStepResult nr_step(const ResistivityField& rho, const MeasurementSet& y, const Mesh& mesh,
                     const Protocol& protocol, const ObjectiveSpec& spec, double lambda) {
    GnContext ctx(mesh, protocol, y, spec);
    auto [jac, h] = jacobian_with_measurements(mesh, rho, protocol);
    const ObjectiveValue f0 = ctx.evaluator.evaluate_with_prediction(rho, h.values);

    NrStepResult out;
    out.f_current = f0.total;
    out.delta = ctx.solve_delta(jac, y.values - h.values, rho, lambda);
    out.rho_next = clamp_floor(rho + out.delta, 1e-6);
    out.f_candidate = ctx.evaluator.evaluate(out.rho_next).total;
    out.accepted = out.f_candidate < f0.total;
    if (!out.accepted) out.rho_next = rho;
    return out;
}

ReconResult run_nr(const Mesh& mesh, const Protocol& protocol, const MeasurementSet& y,
                   const ObjectiveSpec& spec, const NRConfig& config,
                   const ResistivityField& rho0) {
    if (!(config.lambda_up > 1.0) || !(config.lambda_down > 0.0) || !(config.lambda_down < 1.0)) {
        throw ConfigError("lambda factors must satisfy up > 1 and 0 < down < 1");
    }
    if (!(config.step_tol > 0.0)) throw ConfigError("step_tol must be > 0");

    ObjectiveSpec internal = spec;
    internal.alpha = config.alpha;
    GnContext ctx(mesh, protocol, y, internal);

    ReconResult result;
    const auto t_start = std::chrono::steady_clock::now();
    auto elapsed_ms = [&]() {
        if (!config.record_timing) return 0.0;
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                         t_start)
            .count();
    };

    ResistivityField rho = clamp_floor(rho0, config.positivity_floor);
    Eigen::VectorXd h = forward_solve(mesh, rho, protocol).values;
    ++result.forward_solve_count;
    ObjectiveValue f = ctx.evaluator.evaluate_with_prediction(rho, h);
    result.trace.push_back({"nr", 0, f, f.total, result.forward_solve_count, elapsed_ms()});

    const double y_norm = y.values.norm();
    double lambda = config.lambda0;
    std::string reason = "budget";
    const int budget = config.one_step ? std::min(config.max_iterations, 1)
                                       : config.max_iterations;

    for (int iter = 1; iter <= budget; ++iter) {
        if (config.residual_tol > 0.0 &&
            (y.values - h).norm() <= config.residual_tol * y_norm) {
            reason = "residual_tol";
            break;
        }
        auto [jac, h_now] = jacobian_with_measurements(mesh, rho, protocol);
        ++result.jacobian_count;
        ++result.forward_solve_count;  // the Jacobian's drive solve is h(rho)
        h = h_now.values;

        bool accepted = false;
        Eigen::VectorXd accepted_delta;
        for (int reject = 0; reject <= config.max_rejects && !accepted; ++reject) {
            Eigen::VectorXd delta = ctx.solve_delta(jac, y.values - h, rho, lambda);
            double scale = 1.0;
            const int tries = config.line_search ? 4 : 1;
            for (int t = 0; t < tries; ++t, scale *= 0.5) {
                const ResistivityField cand =
                    clamp_floor(rho + scale * delta, config.positivity_floor);
                const Eigen::VectorXd h_cand = forward_solve(mesh, cand, protocol).values;
                ++result.forward_solve_count;
                const ObjectiveValue f_cand = ctx.evaluator.evaluate_with_prediction(cand, h_cand);
                if (f_cand.total < f.total) {
                    accepted_delta = cand - rho;
                    rho = cand;
                    h = h_cand;
                    f = f_cand;
                    accepted = true;
                    break;
                }
            }
            if (!accepted) lambda *= config.lambda_up;
        }
        if (!accepted) {
            reason = "stalled";
            break;
        }
        lambda = std::max(lambda * config.lambda_down, 1e-14);
        result.trace.push_back({"nr", iter, f, f.total, result.forward_solve_count, elapsed_ms()});

        const double denom = rho.lpNorm<Eigen::Infinity>();
        if (denom > 0.0 &&
            accepted_delta.lpNorm<Eigen::Infinity>() / denom < config.step_tol) {
            reason = "step_tol";
            break;
        }
    }
    if (config.one_step && reason == "budget" && config.max_iterations >= 1) reason = "one_step";

    result.rho_est = rho;
    result.termination_reason = reason;
    result.wall_time_ms = elapsed_ms();
    // report under the caller's spec (typically the unsquared GA form)
    result.final_objective = ObjectiveEvaluator(mesh, protocol, y, spec)
                                 .evaluate_with_prediction(rho, h);
    return result;
}

Eigen::VectorXd disturb_field(const Eigen::VectorXd& rho, const DisturbanceSpec& spec) {
    Rng rng(spec.seed);
    Eigen::VectorXd out = rho;
    for (Eigen::Index i = 0; i < out.size(); ++i) {
        out[i] = rho[i] * std::exp(spec.sigma * rng.normal());
    }
    return out;
}

ReconResult run_hybrid(const Mesh& mesh, const Protocol& protocol, const MeasurementSet& y,
                       const ObjectiveSpec& spec, const NRConfig& nr_config,
                       const GAConfig& ga_config,
                       const std::optional<DisturbanceSpec>& disturbance) {
    ReconResult nr = run_nr(mesh, protocol, y, spec, nr_config, Eigen::VectorXd::Ones(
                                                                    mesh.n_elements()));

    Eigen::VectorXd warm = nr.rho_est;
    ReconResult combined;
    combined.trace = nr.trace;
    combined.forward_solve_count = nr.forward_solve_count;
    combined.jacobian_count = nr.jacobian_count;

    const ObjectiveEvaluator reporting(mesh, protocol, y, spec);
    if (disturbance.has_value()) {
        warm = disturb_field(warm, *disturbance);
        const ObjectiveValue f_disturbed = reporting.evaluate(warm);
        ++combined.forward_solve_count;
        combined.trace.push_back({"disturb", 0, f_disturbed, f_disturbed.total,
                                  combined.forward_solve_count, 0.0});
    }

    Individual seed;
    seed.genome = warm;
    ReconResult ga = run_ga(mesh, protocol, y, spec, ga_config, &seed);

    for (TraceRow row : ga.trace) {
        row.forward_solves += combined.forward_solve_count;
        combined.trace.push_back(std::move(row));
    }
    combined.forward_solve_count += ga.forward_solve_count;
    combined.jacobian_count += ga.jacobian_count;
    combined.rho_est = ga.rho_est;
    combined.final_objective = ga.final_objective;
    combined.termination_reason = ga.termination_reason;
    combined.wall_time_ms =
        (nr_config.record_timing || ga_config.record_timing) ? nr.wall_time_ms + ga.wall_time_ms
                                                             : 0.0;
    combined.genome_snapshots = std::move(ga.genome_snapshots);
    return combined;
}

}  // namespace eit
