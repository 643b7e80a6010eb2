#include "replica/policy.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <fmt/format.h>

#include "replica/errors.hpp"

namespace replica {

namespace {

void check_probability(double f) {
    if (!(f >= 0.0 && f < 1.0)) {
        throw DomainError(fmt::format("failure probability {} outside [0, 1)", f));
    }
}

struct Candidate {
    NodeId id;
    double weight;
};

// Takes up to `count` candidates, heaviest first, ties by ascending id.
std::vector<NodeId> select_greedy(std::vector<Candidate> candidates, int count) {
    std::vector<NodeId> chosen;
    while (static_cast<int>(chosen.size()) < count && !candidates.empty()) {
        auto best = std::min_element(candidates.begin(), candidates.end(),
                                     [](const Candidate& a, const Candidate& b) {
                                         if (a.weight != b.weight) return a.weight > b.weight;
                                         return a.id < b.id;
                                     });
        chosen.push_back(best->id);
        candidates.erase(best);
    }
    return chosen;
}

double weight_for(Bytes capacity, Bytes free, double f, WeightBasis basis) {
    return node_weight(basis == WeightBasis::kFreeSpace ? free : capacity, f);
}

}  // namespace

double node_availability(double failure_probability) {
    check_probability(failure_probability);
    return 1.0 - failure_probability;
}

double node_weight(Bytes disk_bytes, double failure_probability) {
    if (disk_bytes < 0) {
        throw DomainError(fmt::format("disk space {} is negative", disk_bytes));
    }
    return static_cast<double>(disk_bytes) * node_availability(failure_probability);
}

double node_weight(const NodeState& node, WeightBasis basis) {
    return weight_for(node.spec.capacity_bytes, node.free_bytes(), node.spec.failure_probability,
                      basis);
}

ReplicaDecision optimum_replica_count(double availability_target,
                                      std::span<const double> failure_probabilities,
                                      int max_replicas, bool accept_clamped) {
    if (!(availability_target >= 0.0 && availability_target < 1.0)) {
        throw DomainError(fmt::format("availability target {} outside [0, 1)", availability_target));
    }
    if (failure_probabilities.empty()) {
        throw DomainError("no failure probabilities given");
    }
    if (max_replicas < 1) {
        throw DomainError(fmt::format("max_replicas {} must be at least 1", max_replicas));
    }
    long double sum = 0.0L;
    for (double f : failure_probabilities) {
        check_probability(f);
        sum += f;
    }
    // Extended accumulation so a list of identical values averages back to
    // exactly that value.
    const double mean = static_cast<double>(sum / failure_probabilities.size());

    ReplicaDecision decision;
    decision.mean_failure_probability = mean;
    for (int r = 1; r <= max_replicas; ++r) {
        decision.replica_count = r;
        decision.achieved_availability = 1.0 - std::pow(mean, r);
        if (decision.achieved_availability > availability_target) return decision;
    }
    if (!accept_clamped) {
        throw UnreachableTarget(fmt::format(
            "availability {} not reachable with at most {} replicas (mean failure probability {})",
            availability_target, max_replicas, mean));
    }
    return decision;
}

std::vector<NodeId> eligible_nodes(const ClusterState& cluster, const Block& block) {
    std::vector<NodeId> out;
    for (const auto& node : cluster.nodes) {
        if (node.alive && node.free_bytes() >= block.size_bytes) out.push_back(node.spec.id);
    }
    return out;
}

std::vector<NodeId> place_replicas(const ClusterState& cluster, const Block& block,
                                   int replica_count) {
    if (replica_count < 1) {
        throw DomainError(fmt::format("replica count {} must be at least 1", replica_count));
    }
    if (block.size_bytes > cluster.block_size_bytes) {
        throw BlockTooLarge(fmt::format("block {} has {} bytes, block size is {}", block.id,
                                        block.size_bytes, cluster.block_size_bytes));
    }
    std::vector<Candidate> candidates;
    for (const auto& node : cluster.nodes) {
        if (node.alive && node.free_bytes() >= block.size_bytes) {
            candidates.push_back({node.spec.id, node_weight(node, cluster.weight_basis)});
        }
    }
    if (static_cast<int>(candidates.size()) < replica_count) {
        throw InsufficientNodes(fmt::format("block {} needs {} nodes, only {} eligible", block.id,
                                            replica_count, candidates.size()));
    }
    return select_greedy(std::move(candidates), replica_count);
}

const RepairPlan& RepairPlan::require_complete() const {
    if (!complete()) {
        int missing = 0;
        for (const auto& s : shortfalls) missing += s.missing;
        throw InsufficientNodes(fmt::format("{} blocks short of {} replicas in total",
                                            shortfalls.size(), missing));
    }
    return *this;
}

RepairPlan repair_plan(const ClusterState& cluster, int target_replica_count) {
    if (target_replica_count < 1) {
        throw DomainError(fmt::format("target replica count {} must be at least 1",
                                      target_replica_count));
    }
    std::map<NodeId, Bytes> free;
    for (const auto& node : cluster.nodes) free[node.spec.id] = node.free_bytes();

    std::vector<const Block*> order;
    order.reserve(cluster.blocks.size());
    for (const auto& block : cluster.blocks) order.push_back(&block);
    std::sort(order.begin(), order.end(),
              [](const Block* a, const Block* b) { return a->id < b->id; });

    RepairPlan plan;
    for (const Block* block : order) {
        const BlockPlacement* placement = cluster.find_placement(block->id);
        const std::vector<NodeId> no_holders;
        const auto& holders = placement ? placement->holder_node_ids : no_holders;
        const int alive = placement ? static_cast<int>(cluster.alive_holder_count(*placement)) : 0;
        const int need = target_replica_count - alive;
        if (need <= 0) continue;

        std::vector<Candidate> candidates;
        for (const auto& node : cluster.nodes) {
            const NodeId id = node.spec.id;
            if (!node.alive || free[id] < block->size_bytes) continue;
            if (std::find(holders.begin(), holders.end(), id) != holders.end()) continue;
            candidates.push_back({id, weight_for(node.spec.capacity_bytes, free[id],
                                                 node.spec.failure_probability,
                                                 cluster.weight_basis)});
        }
        const auto chosen = select_greedy(std::move(candidates), need);
        for (NodeId id : chosen) {
            plan.entries.push_back({block->id, id});
            free[id] -= block->size_bytes;
        }
        const int placed = static_cast<int>(chosen.size());
        if (placed < need) plan.shortfalls.push_back({block->id, need - placed});
    }
    return plan;
}

void apply_repair(ClusterState& cluster, const RepairPlan& plan) {
    for (const auto& entry : plan.entries) cluster.add_replica(entry.block_id, entry.node_id);
}

}  // namespace replica
