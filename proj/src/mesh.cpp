#include "eit/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "eit/errors.hpp"

namespace eit {

namespace {

constexpr double kPi = std::numbers::pi;

int ring_node(int r, int j) {
    // center is node 0; ring r starts after 4*(1+2+...+(r-1)) ring nodes
    int n = 4 * r;
    return 1 + 2 * r * (r - 1) + ((j % n) + n) % n;
}

double signed_area(const Mesh& mesh, const Element& e) {
    const Node& a = mesh.nodes[e.node_ids[0]];
    const Node& b = mesh.nodes[e.node_ids[1]];
    const Node& c = mesh.nodes[e.node_ids[2]];
    return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

}  // namespace

Mesh build_disk_mesh(int n_rings, int n_electrodes) {
    if (n_rings < 2) {
        throw ConfigError("build_disk_mesh: n_rings must be >= 2, got " + std::to_string(n_rings));
    }
    if (n_electrodes < 1) {
        throw ConfigError("build_disk_mesh: n_electrodes must be >= 1, got " +
                          std::to_string(n_electrodes));
    }
    const int n_boundary = 4 * n_rings;
    if (n_boundary % n_electrodes != 0) {
        std::ostringstream msg;
        msg << "build_disk_mesh: n_electrodes = " << n_electrodes << " does not divide the "
            << n_boundary << " boundary nodes produced by n_rings = " << n_rings;
        throw ConfigError(msg.str());
    }

    Mesh mesh;
    mesh.nodes.push_back({0, 0.0, 0.0});
    for (int r = 1; r <= n_rings; ++r) {
        const int n = 4 * r;
        const double radius = static_cast<double>(r) / n_rings;
        for (int j = 0; j < n; ++j) {
            const double theta = 2.0 * kPi * j / n;
            mesh.nodes.push_back({static_cast<int>(mesh.nodes.size()),
                                  radius * std::cos(theta), radius * std::sin(theta)});
        }
    }

    // center fan
    for (int j = 0; j < 4; ++j) {
        mesh.elements.push_back({{0, ring_node(1, j), ring_node(1, j + 1)}, 0});
    }
    // bands: per quadrant, merge-walk the r inner and r+1 outer nodes by angle.
    // Consecutive integers are coprime, so the only fraction tie is at the
    // quadrant end; advancing the inner side there keeps the strip palindromic
    // (mirror-symmetric), which gives the whole mesh dihedral symmetry.
    for (int r = 2; r <= n_rings; ++r) {
        for (int q = 0; q < 4; ++q) {
            std::vector<int> inner(r), outer(r + 1);
            for (int t = 0; t < r; ++t) inner[t] = ring_node(r - 1, q * (r - 1) + t);
            for (int s = 0; s <= r; ++s) outer[s] = ring_node(r, q * r + s);
            int t = 0, s = 0;
            while (s < r || t < r - 1) {
                const double next_inner =
                    (t + 1 <= r - 1) ? static_cast<double>(t + 1) / (r - 1)
                                     : std::numeric_limits<double>::infinity();
                const double next_outer = (s + 1 <= r)
                                              ? static_cast<double>(s + 1) / r
                                              : std::numeric_limits<double>::infinity();
                if (next_outer < next_inner) {
                    mesh.elements.push_back({{outer[s], outer[s + 1], inner[t]}, 0});
                    ++s;
                } else {
                    mesh.elements.push_back({{inner[t], outer[s], inner[t + 1]}, 0});
                    ++t;
                }
            }
        }
    }

    mesh.boundary_ring.resize(n_boundary);
    for (int j = 0; j < n_boundary; ++j) mesh.boundary_ring[j] = ring_node(n_rings, j);

    const int stride = n_boundary / n_electrodes;
    for (int l = 0; l < n_electrodes; ++l) {
        mesh.electrodes.push_back({l, ring_node(n_rings, l * stride)});
    }
    return mesh;
}

std::vector<std::string> validate(const Mesh& mesh) {
    std::vector<std::string> violations;
    auto report = [&violations](const std::string& msg) { violations.push_back(msg); };

    const int n_nodes = mesh.n_nodes();
    const int n_elements = mesh.n_elements();
    if (n_nodes == 0 || n_elements == 0) {
        report("mesh is empty");
        return violations;
    }

    for (int i = 0; i < n_nodes; ++i) {
        const Node& nd = mesh.nodes[i];
        if (nd.id != i) {
            report("node " + std::to_string(i) + " has id " + std::to_string(nd.id) +
                   " (ids must be 0..n-1 in order)");
        }
        if (nd.x * nd.x + nd.y * nd.y > 1.0 + 1e-9) {
            report("node " + std::to_string(i) + " lies outside the unit circle");
        }
        if (!std::isfinite(nd.x) || !std::isfinite(nd.y)) {
            report("node " + std::to_string(i) + " has non-finite coordinates");
        }
    }

    {
        std::map<std::pair<double, double>, int> seen;
        for (int i = 0; i < n_nodes; ++i) {
            auto key = std::make_pair(mesh.nodes[i].x, mesh.nodes[i].y);
            auto [it, inserted] = seen.emplace(key, i);
            if (!inserted) {
                report("nodes " + std::to_string(it->second) + " and " + std::to_string(i) +
                       " have identical coordinates");
            }
        }
    }

    double total_area = 0.0;
    std::map<std::pair<int, int>, int> edge_count;
    for (int e = 0; e < n_elements; ++e) {
        const Element& el = mesh.elements[e];
        bool indices_ok = true;
        for (int v : el.node_ids) {
            if (v < 0 || v >= n_nodes) {
                report("element " + std::to_string(e) + " references invalid node " +
                       std::to_string(v));
                indices_ok = false;
            }
        }
        if (!indices_ok) continue;
        const double area = signed_area(mesh, el);
        if (area <= 0.0) {
            report("element " + std::to_string(e) + " not CCW (signed area " +
                   std::to_string(area) + ")");
        } else if (area <= 1e-12) {
            report("element " + std::to_string(e) + " is degenerate (area " +
                   std::to_string(area) + ")");
        }
        total_area += area;
        for (int i = 0; i < 3; ++i) {
            int a = el.node_ids[i], b = el.node_ids[(i + 1) % 3];
            edge_count[{std::min(a, b), std::max(a, b)}]++;
        }
    }

    int n_boundary_edges = 0;
    for (const auto& [edge, count] : edge_count) {
        if (count == 1) {
            ++n_boundary_edges;
        } else if (count != 2) {
            report("edge (" + std::to_string(edge.first) + "," + std::to_string(edge.second) +
                   ") belongs to " + std::to_string(count) + " elements");
        }
    }

    const int n_edges = static_cast<int>(edge_count.size());
    if (n_nodes - n_edges + n_elements != 1) {
        report("Euler relation violated: V-E+F = " +
               std::to_string(n_nodes - n_edges + n_elements) + " (expected 1)");
    }

    // boundary ring: a CCW cycle of boundary edges covering all of them
    const int ring_size = static_cast<int>(mesh.boundary_ring.size());
    if (ring_size != n_boundary_edges) {
        report("boundary ring has " + std::to_string(ring_size) + " nodes but the mesh has " +
               std::to_string(n_boundary_edges) + " boundary edges");
    }
    double ring_area2 = 0.0;  // shoelace, doubled
    for (int j = 0; j < ring_size; ++j) {
        int a = mesh.boundary_ring[j];
        int b = mesh.boundary_ring[(j + 1) % ring_size];
        if (a < 0 || a >= n_nodes || b < 0 || b >= n_nodes) {
            report("boundary ring references invalid node");
            continue;
        }
        auto it = edge_count.find({std::min(a, b), std::max(a, b)});
        if (it == edge_count.end() || it->second != 1) {
            report("boundary ring edge (" + std::to_string(a) + "," + std::to_string(b) +
                   ") is not a boundary edge");
        }
        ring_area2 += mesh.nodes[a].x * mesh.nodes[b].y - mesh.nodes[b].x * mesh.nodes[a].y;
    }
    if (ring_area2 <= 0.0) report("boundary ring is not counter-clockwise");

    // Elements must tile the boundary polygon exactly; the 2% disk-area check
    // is widened for coarse rings where the inscribed polygon itself falls
    // short of the circle by more than 2%.
    const double polygon_area = 0.5 * ring_area2;
    if (polygon_area > 0.0 && std::abs(total_area - polygon_area) > 1e-9 * polygon_area) {
        report("element areas sum to " + std::to_string(total_area) +
               " but the boundary polygon encloses " + std::to_string(polygon_area));
    }
    if (ring_size > 0) {
        const double x = 2.0 * kPi / ring_size;
        const double polygon_deficit = 1.0 - std::sin(x) / x;
        const double tol = std::max(0.02, 1.02 * polygon_deficit);
        if (std::abs(total_area - kPi) > tol * kPi) {
            report("total element area " + std::to_string(total_area) +
                   " deviates from the disk area by more than " + std::to_string(100.0 * tol) +
                   "%");
        }
    }

    // electrodes: distinct boundary nodes, CCW by position along the ring
    std::set<int> ring_lookup(mesh.boundary_ring.begin(), mesh.boundary_ring.end());
    std::set<int> used;
    std::vector<int> ring_pos;
    for (const Electrode& el : mesh.electrodes) {
        if (!ring_lookup.count(el.boundary_node)) {
            report("electrode " + std::to_string(el.id) + " node " +
                   std::to_string(el.boundary_node) + " is not on the boundary ring");
            continue;
        }
        if (!used.insert(el.boundary_node).second) {
            report("electrode " + std::to_string(el.id) + " reuses boundary node " +
                   std::to_string(el.boundary_node));
        }
        auto it = std::find(mesh.boundary_ring.begin(), mesh.boundary_ring.end(),
                            el.boundary_node);
        ring_pos.push_back(static_cast<int>(it - mesh.boundary_ring.begin()));
    }
    if (ring_pos.size() == mesh.electrodes.size() && !ring_pos.empty()) {
        const int offset = ring_pos[0];
        for (std::size_t i = 1; i < ring_pos.size(); ++i) {
            int prev = (ring_pos[i - 1] - offset + ring_size) % ring_size;
            int cur = (ring_pos[i] - offset + ring_size) % ring_size;
            if (cur <= prev) {
                report("electrodes are not ordered counter-clockwise (electrode " +
                       std::to_string(i) + ")");
                break;
            }
        }
    }

    return violations;
}

ElementGeometry element_geometry(const Mesh& mesh, int elem) {
    if (elem < 0 || elem >= mesh.n_elements()) {
        throw ConfigError("element_geometry: element index " + std::to_string(elem) +
                          " out of range");
    }
    const Element& el = mesh.elements[elem];
    const Node& p1 = mesh.nodes[el.node_ids[0]];
    const Node& p2 = mesh.nodes[el.node_ids[1]];
    const Node& p3 = mesh.nodes[el.node_ids[2]];
    ElementGeometry g;
    g.b = {p2.y - p3.y, p3.y - p1.y, p1.y - p2.y};
    g.c = {p3.x - p2.x, p1.x - p3.x, p2.x - p1.x};
    g.area = 0.5 * ((p2.x - p1.x) * (p3.y - p1.y) - (p3.x - p1.x) * (p2.y - p1.y));
    if (!(g.area > 1e-12)) {
        throw ConfigError("element_geometry: element " + std::to_string(elem) +
                          " is degenerate (area " + std::to_string(g.area) + ")");
    }
    return g;
}

std::pair<double, double> element_centroid(const Mesh& mesh, int elem) {
    const Element& el = mesh.elements[elem];
    double cx = 0.0, cy = 0.0;
    for (int v : el.node_ids) {
        cx += mesh.nodes[v].x;
        cy += mesh.nodes[v].y;
    }
    return {cx / 3.0, cy / 3.0};
}

}  // namespace eit
