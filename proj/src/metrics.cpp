#include "replica/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include <fmt/format.h>

#include "replica/errors.hpp"

namespace replica {

namespace {

void check_usage(Bytes used, Bytes capacity, const char* what) {
    if (capacity <= 0) {
        throw DomainError(fmt::format("{} capacity {} must be positive", what, capacity));
    }
    if (used < 0 || used > capacity) {
        throw DomainError(fmt::format("{} used bytes {} outside [0, {}]", what, used, capacity));
    }
}

template <typename T>
T parse_field(std::string_view text, std::size_t line) {
    T value{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw InputError(fmt::format("metrics csv line {}: bad field '{}'", line, text));
    }
    return value;
}

}  // namespace

double disk_space_utilization(Bytes used_bytes, Bytes capacity_bytes) {
    check_usage(used_bytes, capacity_bytes, "node");
    return static_cast<double>(used_bytes) * 100.0 / static_cast<double>(capacity_bytes);
}

double load_balance(Bytes node_used, Bytes node_capacity, Bytes cluster_used,
                    Bytes cluster_capacity) {
    check_usage(node_used, node_capacity, "node");
    check_usage(cluster_used, cluster_capacity, "cluster");
    const double node_fill = static_cast<double>(node_used) / static_cast<double>(node_capacity);
    const double cluster_fill =
        static_cast<double>(cluster_used) / static_cast<double>(cluster_capacity);
    return 1.0 - std::abs(node_fill - cluster_fill);
}

MetricsReport cluster_report(const ClusterState& cluster, ReportOptions options) {
    MetricsReport report;
    for (const auto& node : cluster.nodes) {
        if (!node.alive && !options.include_dead) continue;
        report.cluster_used_bytes += node.used_bytes;
        report.cluster_capacity_bytes += node.spec.capacity_bytes;
    }
    if (report.cluster_capacity_bytes > 0) {
        report.cluster_dsu_percent =
            disk_space_utilization(report.cluster_used_bytes, report.cluster_capacity_bytes);
    }
    for (const auto& node : cluster.nodes) {
        if (!node.alive && !options.include_dead) continue;
        NodeMetrics m;
        m.node_id = node.spec.id;
        m.used_bytes = node.used_bytes;
        m.dsu_percent = disk_space_utilization(node.used_bytes, node.spec.capacity_bytes);
        m.load_balance = load_balance(node.used_bytes, node.spec.capacity_bytes,
                                      report.cluster_used_bytes, report.cluster_capacity_bytes);
        report.min_load_balance = std::min(report.min_load_balance, m.load_balance);
        report.per_node.push_back(m);
    }
    return report;
}

std::string report_csv(const MetricsReport& report) {
    std::string out = "node_id,used_bytes,dsu_percent,load_balance\n";
    for (const auto& m : report.per_node) {
        out += fmt::format("{},{},{},{}\n", m.node_id, m.used_bytes, m.dsu_percent, m.load_balance);
    }
    return out;
}

std::vector<NodeMetrics> parse_report_csv(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    if (!std::getline(in, line) || line != "node_id,used_bytes,dsu_percent,load_balance") {
        throw InputError("metrics csv: missing header");
    }
    std::vector<NodeMetrics> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string_view> fields;
        std::string_view rest(line);
        for (std::size_t pos; (pos = rest.find(',')) != std::string_view::npos;) {
            fields.push_back(rest.substr(0, pos));
            rest.remove_prefix(pos + 1);
        }
        fields.push_back(rest);
        if (fields.size() != 4) {
            throw InputError(fmt::format("metrics csv line {}: expected 4 fields", line_no));
        }
        rows.push_back({parse_field<NodeId>(fields[0], line_no), parse_field<Bytes>(fields[1], line_no),
                        parse_field<double>(fields[2], line_no),
                        parse_field<double>(fields[3], line_no)});
    }
    return rows;
}

}  // namespace replica
