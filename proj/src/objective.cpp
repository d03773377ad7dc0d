#include "eit/objective.hpp"

#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "eit/errors.hpp"

namespace eit {

Eigen::SparseMatrix<double> element_difference_operator(const Mesh& mesh) {
    std::map<std::pair<int, int>, int> first_owner;
    std::vector<std::pair<int, int>> adjacent;  // (first element, second element)
    for (int e = 0; e < mesh.n_elements(); ++e) {
        const auto& ids = mesh.elements[e].node_ids;
        for (int i = 0; i < 3; ++i) {
            const int a = ids[i], b = ids[(i + 1) % 3];
            const auto key = std::make_pair(std::min(a, b), std::max(a, b));
            auto it = first_owner.find(key);
            if (it == first_owner.end()) {
                first_owner.emplace(key, e);
            } else {
                adjacent.emplace_back(it->second, e);
            }
        }
    }
    Eigen::SparseMatrix<double> op(static_cast<int>(adjacent.size()), mesh.n_elements());
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(adjacent.size() * 2);
    for (std::size_t r = 0; r < adjacent.size(); ++r) {
        triplets.emplace_back(static_cast<int>(r), adjacent[r].first, 1.0);
        triplets.emplace_back(static_cast<int>(r), adjacent[r].second, -1.0);
    }
    op.setFromTriplets(triplets.begin(), triplets.end());
    return op;
}

namespace {

Eigen::VectorXd resolve_ref(const ObjectiveSpec& spec, Eigen::Index n) {
    if (spec.rho_ref.size() == 0) return Eigen::VectorXd::Ones(n);
    if (spec.rho_ref.size() != n) {
        throw ConfigError("rho_ref has " + std::to_string(spec.rho_ref.size()) +
                          " entries, expected " + std::to_string(n));
    }
    return spec.rho_ref;
}

}  // namespace

double tikhonov(const ResistivityField& rho, const ObjectiveSpec& spec,
                const Eigen::SparseMatrix<double>* smoothness_op) {
    const Eigen::VectorXd ref = resolve_ref(spec, rho.size());
    const Eigen::VectorXd diff = rho - ref;
    switch (spec.regularizer) {
        case Regularizer::TikhonovIdentity:
            return diff.squaredNorm();
        case Regularizer::TikhonovSmoothness: {
            if (smoothness_op == nullptr) {
                throw ConfigError("smoothness Tikhonov needs the element-adjacency operator");
            }
            if (smoothness_op->cols() != rho.size()) {
                throw ConfigError("adjacency operator size mismatch");
            }
            return (*smoothness_op * diff).squaredNorm();
        }
    }
    throw ConfigError("unknown regularizer");
}

ObjectiveEvaluator::ObjectiveEvaluator(const Mesh& mesh, const Protocol& protocol,
                                       MeasurementSet y, ObjectiveSpec spec)
    : mesh_(mesh), protocol_(protocol), y_(std::move(y)), spec_(std::move(spec)) {
    if (y_.protocol_id != protocol.name) {
        throw ConfigError("measurements were taken under protocol '" + y_.protocol_id +
                          "', not '" + protocol.name + "'");
    }
    if (y_.values.size() != protocol.n_measurements()) {
        throw ConfigError("measurement vector has " + std::to_string(y_.values.size()) +
                          " values, protocol defines " +
                          std::to_string(protocol.n_measurements()));
    }
    if (!(spec_.alpha >= 0.0) || !std::isfinite(spec_.alpha)) {
        throw ConfigError("alpha must be finite and >= 0");
    }
    rho_ref_ = resolve_ref(spec_, mesh.n_elements());
    spec_.rho_ref = rho_ref_;
    if (spec_.regularizer == Regularizer::TikhonovSmoothness) {
        smooth_op_ = element_difference_operator(mesh);
    }
}

ObjectiveValue ObjectiveEvaluator::evaluate_with_prediction(const ResistivityField& rho,
                                                            const Eigen::VectorXd& h) const {
    ObjectiveValue v;
    const double misfit = (y_.values - h).norm();
    v.data_term = spec_.data_norm == DataNorm::L2 ? misfit : misfit * misfit;
    v.reg_term = tikhonov(rho, spec_, &smooth_op_);
    v.total = v.data_term + spec_.alpha * v.reg_term;
    return v;
}

ObjectiveValue ObjectiveEvaluator::evaluate(const ResistivityField& rho) const {
    const MeasurementSet h = forward_solve(mesh_, rho, protocol_);
    return evaluate_with_prediction(rho, h.values);
}

ObjectiveValue evaluate(const ResistivityField& rho, const MeasurementSet& y,
                        const ObjectiveSpec& spec, const Mesh& mesh, const Protocol& protocol) {
    return ObjectiveEvaluator(mesh, protocol, y, spec).evaluate(rho);
}

}  // namespace eit
