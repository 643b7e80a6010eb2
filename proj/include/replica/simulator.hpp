#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "replica/core_model.hpp"
#include "replica/metrics.hpp"
#include "replica/policy.hpp"

namespace replica {

struct FileSpec {
    FileId file_id = 0;
    Bytes size_bytes = 0;

    bool operator==(const FileSpec&) const = default;
};

struct FixedReplicas {
    int count = 1;
    bool operator==(const FixedReplicas&) const = default;
};
struct OptimumReplicas {
    bool operator==(const OptimumReplicas&) const = default;
};
using ReplicaMode = std::variant<FixedReplicas, OptimumReplicas>;

struct IngestFile {
    FileId file_id = 0;
    bool operator==(const IngestFile&) const = default;
};
struct KillNode {
    NodeId node_id = 0;
    bool operator==(const KillNode&) const = default;
};
struct Repair {
    bool operator==(const Repair&) const = default;
};
using Event = std::variant<IngestFile, KillNode, Repair>;

struct ScheduledEvent {
    std::int64_t step = 0;
    Event event;

    bool operator==(const ScheduledEvent&) const = default;
};

struct Scenario {
    ClusterState cluster;  // initial state, normally empty of blocks
    std::vector<FileSpec> workload;
    ReplicaMode replica_mode = OptimumReplicas{};
    std::vector<ScheduledEvent> events;
    std::uint64_t seed = 0;  // reserved for randomized workloads

    bool operator==(const Scenario&) const = default;
};

struct StepSnapshot {
    std::int64_t step = 0;
    MetricsReport metrics;

    bool operator==(const StepSnapshot&) const = default;
};

struct ScenarioShortfall {
    std::int64_t step = 0;
    BlockId block_id = 0;
    int missing = 0;

    bool operator==(const ScenarioShortfall&) const = default;
};

struct ScenarioResult {
    int replica_count = 0;
    std::vector<StepSnapshot> snapshots;  // one per event
    ClusterState final_state;
    std::int64_t blocks_ingested = 0;
    Bytes logical_bytes = 0;  // sum of ingested file sizes
    std::vector<ScenarioShortfall> shortfalls;

    std::vector<std::pair<NodeId, Bytes>> final_used_bytes() const;
    Bytes physical_bytes() const;

    bool operator==(const ScenarioResult&) const = default;
};

/// Fixed-size blocking of one file; ids run from first_block_id upwards.
std::vector<Block> split_into_blocks(FileId file_id, Bytes file_size_bytes, Bytes block_size_bytes,
                                     BlockId first_block_id = 0);

/// Throws InputError naming the first inconsistency.
void validate_scenario(const Scenario& scenario);

/// Replica factor used throughout a scenario, fixed at its start.
int resolve_replica_count(const Scenario& scenario);

ScenarioResult run_scenario(const Scenario& scenario);

struct SweepPoint {
    double failure_probability = 0.0;
    std::vector<std::pair<NodeId, Bytes>> used_bytes;
};

/// Reruns `base` once per value with node_id's failure probability replaced.
std::vector<SweepPoint> failure_sweep(const Scenario& base, NodeId node_id,
                                      const std::vector<double>& f_values);

// step,node_id,used_bytes,dsu_percent,load_balance
std::string timeseries_csv(const ScenarioResult& result);

}  // namespace replica
