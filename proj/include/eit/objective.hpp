#pragma once

#include <Eigen/Sparse>

#include "eit/forward.hpp"
#include "eit/mesh.hpp"

namespace eit {

enum class Regularizer { TikhonovIdentity, TikhonovSmoothness };
enum class DataNorm { L2, L2Squared };

// f(rho) = ||y - h(rho)|| + alpha * Psi(rho). The plain l2 data norm is the
// default; the squared variant exists for the Gauss-Newton baseline.
struct ObjectiveSpec {
    double alpha = 1e-3;
    Regularizer regularizer = Regularizer::TikhonovSmoothness;
    Eigen::VectorXd rho_ref;  // empty => homogeneous 1
    DataNorm data_norm = DataNorm::L2;
};

struct ObjectiveValue {
    double total = 0.0;
    double data_term = 0.0;
    double reg_term = 0.0;
};

// Element-adjacency difference operator: one row per interior edge with +1/-1
// on the two elements sharing it. L * constant = 0.
Eigen::SparseMatrix<double> element_difference_operator(const Mesh& mesh);

// Psi(rho): squared l2 of (rho - rho_ref), either plain or after applying the
// adjacency operator. smoothness_op is required for the smoothness variant.
double tikhonov(const ResistivityField& rho, const ObjectiveSpec& spec,
                const Eigen::SparseMatrix<double>* smoothness_op = nullptr);

// Bundles mesh/protocol/data and the prebuilt smoothness operator so repeated
// evaluations (GA fitness) only pay for the forward solve. Pure and
// thread-safe: concurrent evaluate() calls with distinct rho are fine.
class ObjectiveEvaluator {
  public:
    ObjectiveEvaluator(const Mesh& mesh, const Protocol& protocol, MeasurementSet y,
                       ObjectiveSpec spec);

    ObjectiveValue evaluate(const ResistivityField& rho) const;

    // Objective terms for a precomputed prediction (shared with the baseline,
    // which gets h(rho) as a byproduct of the Jacobian).
    ObjectiveValue evaluate_with_prediction(const ResistivityField& rho,
                                            const Eigen::VectorXd& h) const;

    const ObjectiveSpec& spec() const { return spec_; }
    const MeasurementSet& measurements() const { return y_; }
    const Mesh& mesh() const { return mesh_; }
    const Protocol& protocol() const { return protocol_; }
    const Eigen::SparseMatrix<double>& smoothness_op() const { return smooth_op_; }
    const Eigen::VectorXd& rho_ref() const { return rho_ref_; }

  private:
    const Mesh& mesh_;
    const Protocol& protocol_;
    MeasurementSet y_;
    ObjectiveSpec spec_;
    Eigen::VectorXd rho_ref_;
    Eigen::SparseMatrix<double> smooth_op_;
};

// One-shot evaluation of f(rho).
ObjectiveValue evaluate(const ResistivityField& rho, const MeasurementSet& y,
                        const ObjectiveSpec& spec, const Mesh& mesh, const Protocol& protocol);

}  // namespace eit
