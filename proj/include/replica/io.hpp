#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "replica/core_model.hpp"
#include "replica/metrics.hpp"
#include "replica/simulator.hpp"

// JSON file formats. Every parse failure throws InputError whose message
// starts with the path of the offending key, e.g. "nodes[2].capacity_gb".

namespace replica::io {

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

// {"block_size_mb": 64, "availability_target": 0.99,
//  "nodes": [{"id": 1, "capacity_gb": 80, "failure_probability": 0.01, "label": "DataNode1"}]}
// Optional "weight_basis": "free_space" | "total_capacity".
ClusterState parse_cluster_config(std::string_view text);

// {"cluster": {...}, "workload": [{"file_id": 1, "size_mb": 1000}],
//  "replica_mode": {"fixed": 3} | "optimum",
//  "events": [{"step": 1, "ingest_file": 1}, {"step": 2, "kill_node": 2}, {"step": 3, "repair": true}],
//  "seed": 0}
Scenario parse_scenario(std::string_view text);

// Full cluster state with byte-exact accounting; round-trips through
// parse_state without loss.
std::string state_to_json(const ClusterState& state);
ClusterState parse_state(std::string_view text);

// Simulation output: summary fields plus the final state under "state".
std::string result_to_json(const ScenarioResult& result);

std::string report_to_json(const MetricsReport& report);

}  // namespace replica::io
