#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "eit/forward.hpp"
#include "eit/mesh.hpp"
#include "eit/phantom.hpp"
#include "eit/recon.hpp"

namespace eit {

// Mesh file: `nodes <N> elements <M> electrodes <L>`, then N x `id x y`,
// M x `id n1 n2 n3`, L x `id boundary_node`. Coordinates use 17 significant
// digits, so write/read round-trips bit-exactly. The boundary ring is listed
// after the electrodes as `ring <node...>`.
void write_mesh(const Mesh& mesh, const std::string& path);
Mesh read_mesh(const std::string& path);

// Measurement file: `protocol <name> n <count>`, one value per line in
// canonical protocol order.
void write_measurements(const MeasurementSet& y, const std::string& path);
MeasurementSet read_measurements(const std::string& path);

// Phantom spec: `background <v>` plus `anomaly <cx> <cy> <r> <value>` lines.
void write_phantom_spec(double background, const std::vector<Anomaly>& anomalies,
                        const std::string& path);
std::pair<double, std::vector<Anomaly>> read_phantom_spec(const std::string& path);

// Per-element field: `field <n>`, one value per line.
void write_field(const Eigen::VectorXd& field, const std::string& path);
Eigen::VectorXd read_field(const std::string& path);

// Trace CSV: generation,best_fitness,mean_fitness,forward_solves,elapsed_ms;
// a leading `stage` column is added when rows carry more than one stage.
void write_trace_csv(const std::vector<TraceRow>& trace, const std::string& path);

}  // namespace eit
