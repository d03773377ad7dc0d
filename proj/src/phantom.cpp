#include "eit/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "eit/errors.hpp"
#include "eit/rng.hpp"

namespace eit {

Phantom make_phantom(const Mesh& mesh, double background, const std::vector<Anomaly>& anomalies) {
    if (!(background > 0.0)) throw ConfigError("phantom background must be > 0");
    Phantom out;
    out.background = background;
    out.anomalies = anomalies;
    out.rho_true = Eigen::VectorXd::Constant(mesh.n_elements(), background);

    for (const Anomaly& a : anomalies) {
        if (!(a.value > 0.0)) throw ConfigError("anomaly value must be > 0");
        if (!(a.radius > 0.0)) throw ConfigError("anomaly radius must be > 0");
        const double dist_center = std::hypot(a.cx, a.cy);
        if (dist_center - a.radius > 1.0) {
            throw ConfigError("anomaly at (" + std::to_string(a.cx) + "," + std::to_string(a.cy) +
                              ") with radius " + std::to_string(a.radius) +
                              " lies entirely outside the unit disk");
        }
        for (int e = 0; e < mesh.n_elements(); ++e) {
            const auto [cx, cy] = element_centroid(mesh, e);
            const double dx = cx - a.cx, dy = cy - a.cy;
            if (dx * dx + dy * dy < a.radius * a.radius) out.rho_true[e] = a.value;
        }
    }
    return out;
}

std::vector<Anomaly> reference_anomalies() { return {{0.4, 0.0, 0.3, 2.0}}; }

MeasurementSet add_noise(const MeasurementSet& y, const NoiseSpec& spec) {
    if (spec.level < 0.0) throw ConfigError("noise level must be >= 0");
    MeasurementSet out = y;
    if (spec.level == 0.0) return out;
    Rng rng(spec.seed);
    if (spec.per_channel) {
        for (Eigen::Index i = 0; i < out.values.size(); ++i) {
            out.values[i] += spec.level * std::abs(y.values[i]) * rng.normal();
        }
    } else {
        const double rms = std::sqrt(y.values.squaredNorm() /
                                     static_cast<double>(y.values.size()));
        for (Eigen::Index i = 0; i < out.values.size(); ++i) {
            out.values[i] += spec.level * rms * rng.normal();
        }
    }
    return out;
}

namespace {

// area-weighted centroid of the ceil(n/10) elements with the largest values;
// ties resolve toward the lower element index
std::pair<double, double> top_decile_centroid(const Eigen::VectorXd& field, const Mesh& mesh) {
    const int n = static_cast<int>(field.size());
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (field[a] != field[b]) return field[a] > field[b];
        return a < b;
    });
    const int n_top = std::max(1, (n + 9) / 10);
    double sx = 0.0, sy = 0.0, sa = 0.0;
    for (int i = 0; i < n_top; ++i) {
        const int e = order[i];
        const auto [cx, cy] = element_centroid(mesh, e);
        const double area = element_geometry(mesh, e).area;
        sx += area * cx;
        sy += area * cy;
        sa += area;
    }
    return {sx / sa, sy / sa};
}

}  // namespace

ImageMetrics image_metrics(const Eigen::VectorXd& rho_est, const Eigen::VectorXd& rho_true,
                           const Mesh& mesh, const Phantom* phantom) {
    if (rho_est.size() != rho_true.size()) {
        throw ConfigError("image_metrics: field lengths differ");
    }
    if (rho_est.size() != mesh.n_elements()) {
        throw ConfigError("image_metrics: field length does not match the mesh");
    }
    ImageMetrics m;
    const double true_norm = rho_true.norm();
    m.relative_l2_error = true_norm > 0.0 ? (rho_est - rho_true).norm() / true_norm
                                          : (rho_est - rho_true).norm();

    const auto n = static_cast<double>(rho_est.size());
    const Eigen::VectorXd de = rho_est.array() - rho_est.mean();
    const Eigen::VectorXd dt = rho_true.array() - rho_true.mean();
    const double se = de.norm(), st = dt.norm();
    if (se > 1e-14 * n && st > 1e-14 * n) {
        m.pearson_correlation = de.dot(dt) / (se * st);
    }

    if (phantom != nullptr && phantom->anomalies.size() == 1) {
        const auto [ex, ey] = top_decile_centroid(rho_est, mesh);
        const auto [tx, ty] = top_decile_centroid(rho_true, mesh);
        m.localization_error = std::hypot(ex - tx, ey - ty);
    }
    return m;
}

}  // namespace eit
