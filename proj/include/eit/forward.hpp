#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "eit/mesh.hpp"

namespace eit {

// One resistivity value per element; the unknown of the inverse problem.
using ResistivityField = Eigen::VectorXd;
// One potential value per node; entry 0 is the grounded reference.
using PotentialField = Eigen::VectorXd;

struct StimulationPattern {
    int source_electrode = 0;
    int sink_electrode = 1;
    double current = 1.0;
};

// Drive patterns plus, per pattern, the ordered differential measurement
// pairs (electrode+, electrode-).
struct Protocol {
    std::string name;
    std::vector<StimulationPattern> patterns;
    std::vector<std::vector<std::pair<int, int>>> measurement_pairs;

    int n_measurements() const {
        int n = 0;
        for (const auto& p : measurement_pairs) n += static_cast<int>(p.size());
        return n;
    }
};

// Canonical adjacent-pair protocol: pattern p drives (p, p+1 mod L); its
// measurement pairs are (q, q+1 mod L) for ascending q, skipping pairs that
// touch a driven electrode. 16 electrodes -> 16 patterns x 13 pairs = 208.
Protocol make_adjacent_protocol(int n_electrodes, double current = 1.0);

struct MeasurementSet {
    std::string protocol_id;
    Eigen::VectorXd values;  // canonical protocol order
};

// Conductance matrix of the P1 discretization of div(rho^-1 grad phi) = 0.
// Symmetric positive semidefinite; rows sum to zero before grounding.
Eigen::SparseMatrix<double> assemble_stiffness(const Mesh& mesh, const ResistivityField& rho);

// Potentials for one injection pattern, node 0 grounded.
PotentialField solve_pattern(const Mesh& mesh, const ResistivityField& rho,
                             const StimulationPattern& pattern);

// h(rho): one factorization per rho, reused across all patterns.
MeasurementSet forward_solve(const Mesh& mesh, const ResistivityField& rho,
                             const Protocol& protocol);

// Sensitivity d(measurement)/d(rho_e) by the adjoint method: all drive and
// adjoint fields share one factorization, so the full matrix costs a handful
// of triangular solves instead of one forward solve per element.
Eigen::MatrixXd jacobian(const Mesh& mesh, const ResistivityField& rho, const Protocol& protocol);

// jacobian() and h(rho), sharing the factorization (the baseline wants both).
std::pair<Eigen::MatrixXd, MeasurementSet> jacobian_with_measurements(
    const Mesh& mesh, const ResistivityField& rho, const Protocol& protocol);

// Process-wide count of jacobian() invocations; lets tests assert that the
// genetic-algorithm path is gradient-free.
std::uint64_t jacobian_invocation_count();

}  // namespace eit
