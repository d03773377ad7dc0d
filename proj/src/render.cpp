#include "eit/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "eit/errors.hpp"

namespace eit {

namespace {

struct Color {
    double r, g, b;
};

Color lerp(const Color& a, const Color& b, double t) {
    return {a.r + t * (b.r - a.r), a.g + t * (b.g - a.g), a.b + t * (b.b - a.b)};
}

// two-segment diverging map, t in [0,1]
Color colormap(double t) {
    static const Color lo{0x31 / 255.0, 0x36 / 255.0, 0x95 / 255.0};
    static const Color mid{1.0, 1.0, 0xbf / 255.0};
    static const Color hi{0xa5 / 255.0, 0x00 / 255.0, 0x26 / 255.0};
    t = std::clamp(t, 0.0, 1.0);
    return t < 0.5 ? lerp(lo, mid, 2.0 * t) : lerp(mid, hi, 2.0 * (t - 0.5));
}

std::string hex(const Color& c) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", static_cast<int>(std::lround(c.r * 255.0)),
                  static_cast<int>(std::lround(c.g * 255.0)),
                  static_cast<int>(std::lround(c.b * 255.0)));
    return buf;
}

std::string fmt(double v, const char* spec = "%.2f") {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

}  // namespace

void render_svg(const Mesh& mesh, const Eigen::VectorXd& field, const std::string& path,
                const RenderOptions& options) {
    if (field.size() != mesh.n_elements()) {
        throw ConfigError("render: field length does not match the mesh");
    }
    double lo = field.minCoeff(), hi = field.maxCoeff();
    if (options.fixed_range) {
        lo = options.fixed_range->first;
        hi = options.fixed_range->second;
    }
    const bool flat = !(hi > lo);

    const int size = options.size_px;
    const int bar_w = 26, bar_gap = 18, label_w = 72;
    const int width = size + bar_gap + bar_w + label_w;
    const int title_h = options.title.empty() ? 0 : 26;
    const int height = size + title_h;
    const double half = size / 2.0;
    const double scale = half / 1.08;  // disk of radius 1 plus margin
    auto px = [&](double x) { return half + scale * x; };
    auto py = [&](double y) { return title_h + half - scale * y; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    svg << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    if (!options.title.empty()) {
        svg << "<text x=\"" << fmt(half) << "\" y=\"18\" font-family=\"sans-serif\" "
            << "font-size=\"14\" text-anchor=\"middle\">" << options.title << "</text>\n";
    }

    for (int e = 0; e < mesh.n_elements(); ++e) {
        const auto& ids = mesh.elements[e].node_ids;
        const double t = flat ? 0.5 : (field[e] - lo) / (hi - lo);
        svg << "<polygon points=\"";
        for (int i = 0; i < 3; ++i) {
            const Node& nd = mesh.nodes[ids[i]];
            svg << fmt(px(nd.x)) << "," << fmt(py(nd.y)) << (i < 2 ? " " : "");
        }
        svg << "\" fill=\"" << hex(colormap(t)) << "\" stroke=\"" << hex(colormap(t))
            << "\" stroke-width=\"0.4\"/>\n";
    }

    for (const Electrode& el : mesh.electrodes) {
        const Node& nd = mesh.nodes[el.boundary_node];
        svg << "<circle cx=\"" << fmt(px(nd.x)) << "\" cy=\"" << fmt(py(nd.y))
            << "\" r=\"4\" fill=\"black\"/>\n";
        svg << "<text x=\"" << fmt(px(nd.x * 1.13)) << "\" y=\"" << fmt(py(nd.y * 1.13) + 3.0)
            << "\" font-family=\"sans-serif\" font-size=\"9\" text-anchor=\"middle\">" << el.id
            << "</text>\n";
    }

    // color bar, drawn as stacked slabs from hi (top) to lo (bottom)
    const int bar_x = size + bar_gap;
    const int bar_steps = 48;
    const double slab_h = static_cast<double>(size - 40) / bar_steps;
    for (int i = 0; i < bar_steps; ++i) {
        const double t = 1.0 - (i + 0.5) / bar_steps;
        svg << "<rect x=\"" << bar_x << "\" y=\"" << fmt(title_h + 20 + i * slab_h)
            << "\" width=\"" << bar_w << "\" height=\"" << fmt(slab_h + 0.5) << "\" fill=\""
            << hex(colormap(t)) << "\"/>\n";
    }
    auto bar_label = [&](double v, double ty) {
        svg << "<text x=\"" << bar_x + bar_w + 6 << "\" y=\"" << fmt(ty)
            << "\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(v, "%.6g")
            << "</text>\n";
    };
    bar_label(hi, title_h + 24.0);
    bar_label(0.5 * (lo + hi), title_h + 20.0 + 0.5 * (size - 40) + 4.0);
    bar_label(lo, title_h + size - 16.0);

    svg << "</svg>\n";

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << svg.str();
    if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace eit
