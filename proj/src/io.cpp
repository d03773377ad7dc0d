#include "eit/io.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "eit/errors.hpp"

namespace eit {

namespace {

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    return in;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    return out;
}

[[noreturn]] void malformed(const std::string& path, const std::string& what) {
    throw IoError("malformed file '" + path + "': " + what);
}

}  // namespace

void write_mesh(const Mesh& mesh, const std::string& path) {
    auto out = open_out(path);
    out << "nodes " << mesh.n_nodes() << " elements " << mesh.n_elements() << " electrodes "
        << mesh.n_electrodes() << "\n";
    for (const Node& n : mesh.nodes) {
        out << n.id << " " << g17(n.x) << " " << g17(n.y) << "\n";
    }
    for (int e = 0; e < mesh.n_elements(); ++e) {
        const auto& ids = mesh.elements[e].node_ids;
        out << e << " " << ids[0] << " " << ids[1] << " " << ids[2] << "\n";
    }
    for (const Electrode& el : mesh.electrodes) {
        out << el.id << " " << el.boundary_node << "\n";
    }
    out << "ring";
    for (int n : mesh.boundary_ring) out << " " << n;
    out << "\n";
    if (!out) throw IoError("failed writing '" + path + "'");
}

Mesh read_mesh(const std::string& path) {
    auto in = open_in(path);
    std::string kw_nodes, kw_elements, kw_electrodes;
    int n_nodes = 0, n_elements = 0, n_electrodes = 0;
    in >> kw_nodes >> n_nodes >> kw_elements >> n_elements >> kw_electrodes >> n_electrodes;
    if (!in || kw_nodes != "nodes" || kw_elements != "elements" || kw_electrodes != "electrodes") {
        malformed(path, "expected header 'nodes <N> elements <M> electrodes <L>'");
    }
    if (n_nodes <= 0 || n_elements <= 0 || n_electrodes < 0) malformed(path, "non-positive counts");
    Mesh mesh;
    mesh.nodes.resize(n_nodes);
    for (int i = 0; i < n_nodes; ++i) {
        Node& n = mesh.nodes[i];
        in >> n.id >> n.x >> n.y;
        if (!in || n.id != i) malformed(path, "node record " + std::to_string(i));
    }
    mesh.elements.resize(n_elements);
    for (int e = 0; e < n_elements; ++e) {
        int id = 0;
        auto& ids = mesh.elements[e].node_ids;
        in >> id >> ids[0] >> ids[1] >> ids[2];
        if (!in || id != e) malformed(path, "element record " + std::to_string(e));
    }
    mesh.electrodes.resize(n_electrodes);
    for (int l = 0; l < n_electrodes; ++l) {
        Electrode& el = mesh.electrodes[l];
        in >> el.id >> el.boundary_node;
        if (!in || el.id != l) malformed(path, "electrode record " + std::to_string(l));
    }
    std::string kw_ring;
    in >> kw_ring;
    if (!in || kw_ring != "ring") malformed(path, "expected 'ring <node...>'");
    std::string rest;
    std::getline(in, rest);
    std::istringstream ring(rest);
    int v = 0;
    while (ring >> v) mesh.boundary_ring.push_back(v);
    if (mesh.boundary_ring.empty()) malformed(path, "empty boundary ring");
    return mesh;
}

void write_measurements(const MeasurementSet& y, const std::string& path) {
    auto out = open_out(path);
    out << "protocol " << y.protocol_id << " n " << y.values.size() << "\n";
    for (Eigen::Index i = 0; i < y.values.size(); ++i) out << g17(y.values[i]) << "\n";
    if (!out) throw IoError("failed writing '" + path + "'");
}

MeasurementSet read_measurements(const std::string& path) {
    auto in = open_in(path);
    std::string kw_protocol, kw_n;
    MeasurementSet y;
    Eigen::Index n = 0;
    in >> kw_protocol >> y.protocol_id >> kw_n >> n;
    if (!in || kw_protocol != "protocol" || kw_n != "n" || n < 0) {
        malformed(path, "expected header 'protocol <name> n <count>'");
    }
    y.values.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        in >> y.values[i];
        if (!in) malformed(path, "value " + std::to_string(i));
    }
    return y;
}

void write_phantom_spec(double background, const std::vector<Anomaly>& anomalies,
                        const std::string& path) {
    auto out = open_out(path);
    out << "background " << g17(background) << "\n";
    for (const Anomaly& a : anomalies) {
        out << "anomaly " << g17(a.cx) << " " << g17(a.cy) << " " << g17(a.radius) << " "
            << g17(a.value) << "\n";
    }
    if (!out) throw IoError("failed writing '" + path + "'");
}

std::pair<double, std::vector<Anomaly>> read_phantom_spec(const std::string& path) {
    auto in = open_in(path);
    double background = 0.0;
    bool have_background = false;
    std::vector<Anomaly> anomalies;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string kw;
        if (!(ls >> kw) || kw.starts_with("#")) continue;
        if (kw == "background") {
            if (!(ls >> background)) malformed(path, "line " + std::to_string(line_no));
            have_background = true;
        } else if (kw == "anomaly") {
            Anomaly a;
            if (!(ls >> a.cx >> a.cy >> a.radius >> a.value)) {
                malformed(path, "line " + std::to_string(line_no));
            }
            anomalies.push_back(a);
        } else {
            malformed(path, "unknown keyword '" + kw + "' on line " + std::to_string(line_no));
        }
    }
    if (!have_background) malformed(path, "missing 'background' line");
    return {background, anomalies};
}

void write_field(const Eigen::VectorXd& field, const std::string& path) {
    auto out = open_out(path);
    out << "field " << field.size() << "\n";
    for (Eigen::Index i = 0; i < field.size(); ++i) out << g17(field[i]) << "\n";
    if (!out) throw IoError("failed writing '" + path + "'");
}

Eigen::VectorXd read_field(const std::string& path) {
    auto in = open_in(path);
    std::string kw;
    Eigen::Index n = 0;
    in >> kw >> n;
    if (!in || kw != "field" || n < 0) malformed(path, "expected header 'field <n>'");
    Eigen::VectorXd field(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        in >> field[i];
        if (!in) malformed(path, "value " + std::to_string(i));
    }
    return field;
}

void write_trace_csv(const std::vector<TraceRow>& trace, const std::string& path) {
    auto out = open_out(path);
    std::set<std::string> stages;
    for (const TraceRow& row : trace) stages.insert(row.stage);
    const bool with_stage = stages.size() > 1;
    if (with_stage) out << "stage,";
    out << "generation,best_fitness,mean_fitness,forward_solves,elapsed_ms\n";
    for (const TraceRow& row : trace) {
        if (with_stage) out << row.stage << ",";
        out << row.generation << "," << g17(row.best.total) << "," << g17(row.mean_fitness) << ","
            << row.forward_solves << "," << g17(row.elapsed_ms) << "\n";
    }
    if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace eit
