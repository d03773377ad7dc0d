#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "eit/forward.hpp"
#include "eit/mesh.hpp"

namespace eit {

struct Anomaly {
    double cx = 0.0;
    double cy = 0.0;
    double radius = 0.0;
    double value = 1.0;
};

struct Phantom {
    Eigen::VectorXd rho_true;
    double background = 1.0;
    std::vector<Anomaly> anomalies;
};

// Centroid rule: an element takes an anomaly's value iff its centroid lies
// inside the anomaly disk; later anomalies override earlier ones.
Phantom make_phantom(const Mesh& mesh, double background, const std::vector<Anomaly>& anomalies);

// Reference scene used by the scenario runs and the CLI default: background 1,
// one resistive inclusion of radius 0.3 at (0.4, 0) with rho = 2.
std::vector<Anomaly> reference_anomalies();

struct NoiseSpec {
    double level = 0.0;  // relative to the global RMS of the vector
    std::uint64_t seed = 0;
    bool per_channel = false;  // relative to |y_i| instead of the global RMS
};

// y + level * RMS(y) * g with g i.i.d. standard Gaussian.
MeasurementSet add_noise(const MeasurementSet& y, const NoiseSpec& spec);

struct ImageMetrics {
    double relative_l2_error = 0.0;
    std::optional<double> pearson_correlation;    // empty when a field is constant
    std::optional<double> localization_error;     // single-anomaly phantoms only
};

// Localization compares the area-weighted centroid of the top-decile elements
// of the estimate against the same statistic of the true field.
ImageMetrics image_metrics(const Eigen::VectorXd& rho_est, const Eigen::VectorXd& rho_true,
                           const Mesh& mesh, const Phantom* phantom = nullptr);

}  // namespace eit
