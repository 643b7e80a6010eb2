#pragma once

#include <string>
#include <vector>

#include "replica/core_model.hpp"

namespace replica {

struct NodeMetrics {
    NodeId node_id = 0;
    Bytes used_bytes = 0;
    double dsu_percent = 0.0;
    double load_balance = 1.0;

    bool operator==(const NodeMetrics&) const = default;
};

struct MetricsReport {
    std::vector<NodeMetrics> per_node;
    Bytes cluster_used_bytes = 0;
    Bytes cluster_capacity_bytes = 0;
    double cluster_dsu_percent = 0.0;
    double min_load_balance = 1.0;

    bool operator==(const MetricsReport&) const = default;
};

// Disk-space utilization in percent of capacity.
double disk_space_utilization(Bytes used_bytes, Bytes capacity_bytes);

// 1 - |node fill fraction - cluster fill fraction|; 1 means perfectly balanced.
double load_balance(Bytes node_used, Bytes node_capacity, Bytes cluster_used,
                    Bytes cluster_capacity);

struct ReportOptions {
    bool include_dead = true;  // dead nodes still hold their disks
};

MetricsReport cluster_report(const ClusterState& cluster, ReportOptions options = {});

// node_id,used_bytes,dsu_percent,load_balance with round-trip precision.
std::string report_csv(const MetricsReport& report);
std::vector<NodeMetrics> parse_report_csv(const std::string& csv);

}  // namespace replica
