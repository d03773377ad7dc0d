#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <utility>

#include "eit/mesh.hpp"

namespace eit {

// SVG rendering of a per-element field. Each triangle is filled by a linear
// two-segment color map over [lo, hi]: #313695 (lo) -> #ffffbf (mid) ->
// #a50026 (hi). The range defaults to [min, max] of the field; a constant
// field maps to the midpoint color. Output is byte-deterministic for fixed
// inputs.
struct RenderOptions {
    std::optional<std::pair<double, double>> fixed_range;
    int size_px = 560;
    std::string title;
};

void render_svg(const Mesh& mesh, const Eigen::VectorXd& field, const std::string& path,
                const RenderOptions& options = {});

}  // namespace eit
