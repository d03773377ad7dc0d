#include "eit/forward.hpp"

#include <Eigen/SparseCholesky>
#include <atomic>
#include <cmath>
#include <string>
#include <vector>

#include "eit/errors.hpp"

namespace eit {

namespace {

std::atomic<std::uint64_t> g_jacobian_calls{0};

void check_rho(const Mesh& mesh, const ResistivityField& rho) {
    if (rho.size() != mesh.n_elements()) {
        throw ConfigError("resistivity field has " + std::to_string(rho.size()) +
                          " entries for a mesh with " + std::to_string(mesh.n_elements()) +
                          " elements");
    }
    for (int e = 0; e < rho.size(); ++e) {
        if (!(rho[e] > 0.0) || !std::isfinite(rho[e])) {
            throw ConfigError("resistivity of element " + std::to_string(e) +
                              " is not a positive finite value (" + std::to_string(rho[e]) + ")");
        }
    }
}

void check_pattern(const Mesh& mesh, const StimulationPattern& p) {
    const int L = mesh.n_electrodes();
    if (p.source_electrode < 0 || p.source_electrode >= L || p.sink_electrode < 0 ||
        p.sink_electrode >= L) {
        throw ConfigError("stimulation pattern references electrode outside 0.." +
                          std::to_string(L - 1));
    }
    if (p.source_electrode == p.sink_electrode) {
        throw ConfigError("stimulation pattern drives the same electrode as source and sink");
    }
}

// Local stiffness of element e at unit conductivity:
// S_ij = (b_i b_j + c_i c_j) / (4 A).
Eigen::Matrix3d local_unit_stiffness(const Mesh& mesh, int elem) {
    const ElementGeometry g = element_geometry(mesh, elem);
    Eigen::Matrix3d s;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            s(i, j) = (g.b[i] * g.b[j] + g.c[i] * g.c[j]) / (4.0 * g.area);
        }
    }
    return s;
}

// Shared grounded factorization: node 0 is eliminated symmetrically, which
// keeps the reduced system sparse SPD.
class GroundedSolver {
  public:
    GroundedSolver(const Mesh& mesh, const ResistivityField& rho) : n_(mesh.n_nodes()) {
        Eigen::SparseMatrix<double> k = assemble_stiffness(mesh, rho);
        Eigen::SparseMatrix<double> reduced = k.bottomRightCorner(n_ - 1, n_ - 1);
        ldlt_.compute(reduced);
        if (ldlt_.info() != Eigen::Success) {
            throw NumericalError("grounded stiffness factorization failed (singular system)");
        }
        full_ = std::move(k);
    }

    // rhs over all nodes; returns potentials with phi[0] == 0 exactly
    Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const {
        Eigen::VectorXd phi = Eigen::VectorXd::Zero(n_);
        phi.tail(n_ - 1) = ldlt_.solve(rhs.tail(n_ - 1));
        const double rhs_norm = rhs.norm();
        if (rhs_norm > 0.0) {
            const double residual = (full_ * phi - rhs).norm();
            if (!(residual <= 1e-10 * rhs_norm)) {
                throw NumericalError("potential solve residual " + std::to_string(residual) +
                                     " exceeds 1e-10 * ||b||");
            }
        }
        return phi;
    }

    Eigen::MatrixXd solve_many(const Eigen::MatrixXd& rhs) const {
        Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(n_, rhs.cols());
        phi.bottomRows(n_ - 1) = ldlt_.solve(rhs.bottomRows(n_ - 1));
        for (int c = 0; c < rhs.cols(); ++c) {
            const double rhs_norm = rhs.col(c).norm();
            if (rhs_norm == 0.0) continue;
            const double residual = (full_ * phi.col(c) - rhs.col(c)).norm();
            if (!(residual <= 1e-10 * rhs_norm)) {
                throw NumericalError("potential solve residual " + std::to_string(residual) +
                                     " exceeds 1e-10 * ||b||");
            }
        }
        return phi;
    }

  private:
    int n_;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
    Eigen::SparseMatrix<double> full_;
};

Eigen::VectorXd pattern_rhs(const Mesh& mesh, const StimulationPattern& p) {
    Eigen::VectorXd b = Eigen::VectorXd::Zero(mesh.n_nodes());
    b[mesh.electrodes[p.source_electrode].boundary_node] += p.current;
    b[mesh.electrodes[p.sink_electrode].boundary_node] -= p.current;
    return b;
}

void check_protocol(const Mesh& mesh, const Protocol& protocol) {
    if (protocol.patterns.size() != protocol.measurement_pairs.size()) {
        throw ConfigError("protocol '" + protocol.name +
                          "' has mismatched pattern and measurement lists");
    }
    const int L = mesh.n_electrodes();
    for (std::size_t p = 0; p < protocol.patterns.size(); ++p) {
        check_pattern(mesh, protocol.patterns[p]);
        const auto& drv = protocol.patterns[p];
        for (const auto& [plus, minus] : protocol.measurement_pairs[p]) {
            if (plus < 0 || plus >= L || minus < 0 || minus >= L) {
                throw ConfigError("protocol '" + protocol.name +
                                  "' measurement pair references electrode outside 0.." +
                                  std::to_string(L - 1));
            }
            if (plus == drv.source_electrode || plus == drv.sink_electrode ||
                minus == drv.source_electrode || minus == drv.sink_electrode) {
                throw ConfigError("protocol '" + protocol.name +
                                  "' measures on a driven electrode in pattern " +
                                  std::to_string(p));
            }
        }
    }
}

}  // namespace

Protocol make_adjacent_protocol(int n_electrodes, double current) {
    if (n_electrodes < 4) {
        throw ConfigError("adjacent protocol needs at least 4 electrodes, got " +
                          std::to_string(n_electrodes));
    }
    Protocol protocol;
    protocol.name = "adjacent-" + std::to_string(n_electrodes);
    const int L = n_electrodes;
    for (int p = 0; p < L; ++p) {
        protocol.patterns.push_back({p, (p + 1) % L, current});
        std::vector<std::pair<int, int>> pairs;
        for (int q = 0; q < L; ++q) {
            const int qa = q, qb = (q + 1) % L;
            if (qa == p || qa == (p + 1) % L || qb == p || qb == (p + 1) % L) continue;
            pairs.emplace_back(qa, qb);
        }
        protocol.measurement_pairs.push_back(std::move(pairs));
    }
    return protocol;
}

Eigen::SparseMatrix<double> assemble_stiffness(const Mesh& mesh, const ResistivityField& rho) {
    check_rho(mesh, rho);
    const int n = mesh.n_nodes();
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(mesh.n_elements()) * 9);
    for (int e = 0; e < mesh.n_elements(); ++e) {
        const Eigen::Matrix3d s = local_unit_stiffness(mesh, e);
        const double sigma = 1.0 / rho[e];
        const auto& ids = mesh.elements[e].node_ids;
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                triplets.emplace_back(ids[i], ids[j], sigma * s(i, j));
            }
        }
    }
    Eigen::SparseMatrix<double> k(n, n);
    k.setFromTriplets(triplets.begin(), triplets.end());
    return k;
}

PotentialField solve_pattern(const Mesh& mesh, const ResistivityField& rho,
                             const StimulationPattern& pattern) {
    check_pattern(mesh, pattern);
    GroundedSolver solver(mesh, rho);
    return solver.solve(pattern_rhs(mesh, pattern));
}

MeasurementSet forward_solve(const Mesh& mesh, const ResistivityField& rho,
                             const Protocol& protocol) {
    check_protocol(mesh, protocol);
    GroundedSolver solver(mesh, rho);

    const int n_patterns = static_cast<int>(protocol.patterns.size());
    Eigen::MatrixXd rhs(mesh.n_nodes(), n_patterns);
    for (int p = 0; p < n_patterns; ++p) rhs.col(p) = pattern_rhs(mesh, protocol.patterns[p]);
    const Eigen::MatrixXd phi = solver.solve_many(rhs);

    MeasurementSet out;
    out.protocol_id = protocol.name;
    out.values.resize(protocol.n_measurements());
    int m = 0;
    for (int p = 0; p < n_patterns; ++p) {
        for (const auto& [plus, minus] : protocol.measurement_pairs[p]) {
            out.values[m++] = phi(mesh.electrodes[plus].boundary_node, p) -
                              phi(mesh.electrodes[minus].boundary_node, p);
        }
    }
    return out;
}

std::pair<Eigen::MatrixXd, MeasurementSet> jacobian_with_measurements(
    const Mesh& mesh, const ResistivityField& rho, const Protocol& protocol) {
    g_jacobian_calls.fetch_add(1, std::memory_order_relaxed);
    check_protocol(mesh, protocol);
    GroundedSolver solver(mesh, rho);
    const int n = mesh.n_nodes();
    const int n_patterns = static_cast<int>(protocol.patterns.size());
    const int n_meas = protocol.n_measurements();
    const int n_elem = mesh.n_elements();

    // distinct measurement functionals (+1/-1 nodal vectors)
    std::vector<std::pair<int, int>> functionals;
    std::vector<std::vector<int>> meas_functional(n_patterns);
    auto functional_index = [&](int plus, int minus) {
        for (std::size_t i = 0; i < functionals.size(); ++i) {
            if (functionals[i] == std::make_pair(plus, minus)) return static_cast<int>(i);
        }
        functionals.emplace_back(plus, minus);
        return static_cast<int>(functionals.size()) - 1;
    };
    for (int p = 0; p < n_patterns; ++p) {
        for (const auto& [plus, minus] : protocol.measurement_pairs[p]) {
            meas_functional[p].push_back(functional_index(plus, minus));
        }
    }

    Eigen::MatrixXd rhs(n, n_patterns + static_cast<int>(functionals.size()));
    for (int p = 0; p < n_patterns; ++p) rhs.col(p) = pattern_rhs(mesh, protocol.patterns[p]);
    for (std::size_t f = 0; f < functionals.size(); ++f) {
        Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
        g[mesh.electrodes[functionals[f].first].boundary_node] = 1.0;
        g[mesh.electrodes[functionals[f].second].boundary_node] = -1.0;
        rhs.col(n_patterns + static_cast<int>(f)) = g;
    }
    const Eigen::MatrixXd fields = solver.solve_many(rhs);

    MeasurementSet h;
    h.protocol_id = protocol.name;
    h.values.resize(n_meas);
    Eigen::MatrixXd jac(n_meas, n_elem);

    // dV/dsigma_e = -int_e grad(u_drive).grad(u_adjoint); dV/drho_e scales it
    // by -1/rho_e^2.
    std::vector<Eigen::Matrix3d> local(n_elem);
    for (int e = 0; e < n_elem; ++e) local[e] = local_unit_stiffness(mesh, e);

    int m = 0;
    for (int p = 0; p < n_patterns; ++p) {
        const auto& pairs = protocol.measurement_pairs[p];
        for (std::size_t i = 0; i < pairs.size(); ++i, ++m) {
            const auto u = fields.col(p);
            const auto w = fields.col(n_patterns + meas_functional[p][i]);
            h.values[m] = u[mesh.electrodes[pairs[i].first].boundary_node] -
                          u[mesh.electrodes[pairs[i].second].boundary_node];
            for (int e = 0; e < n_elem; ++e) {
                const auto& ids = mesh.elements[e].node_ids;
                Eigen::Vector3d ue(u[ids[0]], u[ids[1]], u[ids[2]]);
                Eigen::Vector3d we(w[ids[0]], w[ids[1]], w[ids[2]]);
                const double dv_dsigma = -we.dot(local[e] * ue);
                jac(m, e) = -dv_dsigma / (rho[e] * rho[e]);
            }
        }
    }
    return {std::move(jac), std::move(h)};
}

Eigen::MatrixXd jacobian(const Mesh& mesh, const ResistivityField& rho, const Protocol& protocol) {
    return jacobian_with_measurements(mesh, rho, protocol).first;
}

std::uint64_t jacobian_invocation_count() {
    return g_jacobian_calls.load(std::memory_order_relaxed);
}

}  // namespace eit
