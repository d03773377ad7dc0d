#pragma once

#include <array>
#include <string>
#include <vector>

namespace eit {

struct Node {
    int id = 0;
    double x = 0.0;
    double y = 0.0;
};

struct Element {
    std::array<int, 3> node_ids{};  // counter-clockwise
    int region_tag = 0;
};

struct Electrode {
    int id = 0;
    int boundary_node = 0;
};

// Triangulated disk with electrodes attached to boundary nodes.
// Immutable after construction; safe to share across threads.
struct Mesh {
    std::vector<Node> nodes;
    std::vector<Element> elements;
    std::vector<int> boundary_ring;  // node indices, counter-clockwise cycle
    std::vector<Electrode> electrodes;

    int n_nodes() const { return static_cast<int>(nodes.size()); }
    int n_elements() const { return static_cast<int>(elements.size()); }
    int n_electrodes() const { return static_cast<int>(electrodes.size()); }
};

// Concentric-ring triangulation of the unit disk: ring r of n_rings carries
// 4r nodes at radius r/n_rings, giving 4*n_rings^2 elements (576 at 12 rings)
// and 4*n_rings boundary nodes. Electrodes are spread uniformly over the
// boundary ring, so n_electrodes must divide 4*n_rings. The construction has
// the full dihedral symmetry of the square (identical quadrants, palindromic
// band triangulation), which the forward-solver symmetry tests rely on.
Mesh build_disk_mesh(int n_rings, int n_electrodes);

// Checks every mesh invariant; returns human-readable violations (empty = valid).
std::vector<std::string> validate(const Mesh& mesh);

// Linear-triangle shape geometry: grad(phi_i) = (b[i], c[i]) / (2*area).
struct ElementGeometry {
    double area = 0.0;
    std::array<double, 3> b{};
    std::array<double, 3> c{};
};

ElementGeometry element_geometry(const Mesh& mesh, int elem);

// Centroid of one element.
std::pair<double, double> element_centroid(const Mesh& mesh, int elem);

}  // namespace eit
