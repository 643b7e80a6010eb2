#pragma once

#include <span>
#include <vector>

#include "replica/core_model.hpp"

namespace replica {

struct ReplicaDecision {
    int replica_count = 1;
    double achieved_availability = 0.0;  // 1 - mean_f^replica_count
    double mean_failure_probability = 0.0;
};

/// 1 - f. Throws DomainError unless 0 <= f < 1.
double node_availability(double failure_probability);

/// Placement score of a node: disk space scaled by its availability.
double node_weight(Bytes disk_bytes, double failure_probability);

/// Weight of a node under the cluster's configured basis.
double node_weight(const NodeState& node, WeightBasis basis);

/// Smallest R >= 1 with 1 - mean(f)^R strictly above the availability target.
///
/// Only R <= max_replicas is considered. If none qualifies, throws
/// UnreachableTarget unless `accept_clamped` is set, in which case R is
/// clamped to max_replicas and achieved_availability is reported as is.
ReplicaDecision optimum_replica_count(double availability_target,
                                      std::span<const double> failure_probabilities,
                                      int max_replicas, bool accept_clamped = false);

/// Alive nodes with room for the block.
std::vector<NodeId> eligible_nodes(const ClusterState& cluster, const Block& block);

/// Greedy weighted placement: repeatedly takes the heaviest remaining
/// eligible node (ties by ascending id). Does not modify the cluster.
std::vector<NodeId> place_replicas(const ClusterState& cluster, const Block& block,
                                   int replica_count);

struct RepairEntry {
    BlockId block_id = 0;
    NodeId node_id = 0;

    bool operator==(const RepairEntry&) const = default;
};

struct Shortfall {
    BlockId block_id = 0;
    int missing = 0;  // replicas that could not be placed

    bool operator==(const Shortfall&) const = default;
};

struct RepairPlan {
    std::vector<RepairEntry> entries;
    std::vector<Shortfall> shortfalls;

    bool complete() const { return shortfalls.empty(); }
    // Throws InsufficientNodes when some block could not be restored.
    const RepairPlan& require_complete() const;
};

/// New replicas needed to bring every block back to `target_replica_count`
/// alive holders. Blocks are handled in ascending id; each pick uses the same
/// weighting as place_replicas with capacity already claimed by earlier
/// entries taken into account.
RepairPlan repair_plan(const ClusterState& cluster, int target_replica_count);

void apply_repair(ClusterState& cluster, const RepairPlan& plan);

}  // namespace replica
