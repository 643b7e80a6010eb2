#include "replica/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "replica/errors.hpp"

namespace replica::io {

using nlohmann::json;

namespace {

json parse_json(std::string_view text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(fmt::format("<root>: invalid JSON ({})", e.what()));
    }
}

std::string join(std::string_view ctx, std::string_view key) {
    return ctx.empty() ? std::string(key) : fmt::format("{}.{}", ctx, key);
}

const json& require(const json& obj, std::string_view key, std::string_view ctx) {
    if (!obj.is_object()) throw InputError(fmt::format("{}: expected an object", ctx.empty() ? "<root>" : ctx));
    auto it = obj.find(key);
    if (it == obj.end()) throw InputError(fmt::format("{}: missing key", join(ctx, key)));
    return *it;
}

double number(const json& v, const std::string& where) {
    if (!v.is_number()) throw InputError(fmt::format("{}: expected a number", where));
    return v.get<double>();
}

std::int64_t integer(const json& v, const std::string& where) {
    if (!v.is_number_integer()) throw InputError(fmt::format("{}: expected an integer", where));
    return v.get<std::int64_t>();
}

double probability(const json& v, const std::string& where) {
    const double p = number(v, where);
    if (!(p >= 0.0 && p < 1.0)) throw InputError(fmt::format("{}: {} outside [0, 1)", where, p));
    return p;
}

Bytes scaled_bytes(const json& v, const std::string& where, Bytes unit) {
    const double amount = number(v, where);
    if (!(amount > 0.0) || !std::isfinite(amount)) {
        throw InputError(fmt::format("{}: must be positive", where));
    }
    return static_cast<Bytes>(std::llround(amount * static_cast<double>(unit)));
}

WeightBasis parse_basis(const json& v, const std::string& where) {
    if (v == "free_space") return WeightBasis::kFreeSpace;
    if (v == "total_capacity") return WeightBasis::kTotalCapacity;
    throw InputError(fmt::format("{}: expected \"free_space\" or \"total_capacity\"", where));
}

const char* basis_name(WeightBasis basis) {
    return basis == WeightBasis::kFreeSpace ? "free_space" : "total_capacity";
}

ClusterState cluster_from_json(const json& root, std::string_view ctx) {
    ClusterState state;
    if (!root.is_object()) throw InputError(fmt::format("{}: expected an object", ctx.empty() ? "<root>" : ctx));
    if (auto it = root.find("block_size_mb"); it != root.end()) {
        state.block_size_bytes = scaled_bytes(*it, join(ctx, "block_size_mb"), kMiB);
    }
    state.availability_target =
        probability(require(root, "availability_target", ctx), join(ctx, "availability_target"));
    if (auto it = root.find("weight_basis"); it != root.end()) {
        state.weight_basis = parse_basis(*it, join(ctx, "weight_basis"));
    }
    const json& nodes = require(root, "nodes", ctx);
    const std::string nodes_ctx = join(ctx, "nodes");
    if (!nodes.is_array()) throw InputError(fmt::format("{}: expected an array", nodes_ctx));
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const std::string nctx = fmt::format("{}[{}]", nodes_ctx, i);
        const json& node = nodes[i];
        NodeSpec spec;
        spec.id = integer(require(node, "id", nctx), nctx + ".id");
        spec.capacity_bytes = scaled_bytes(require(node, "capacity_gb", nctx), nctx + ".capacity_gb", kGiB);
        spec.failure_probability =
            probability(require(node, "failure_probability", nctx), nctx + ".failure_probability");
        if (auto it = node.find("label"); it != node.end()) {
            if (!it->is_string()) throw InputError(nctx + ".label: expected a string");
            spec.label = it->get<std::string>();
        }
        if (state.find_node(spec.id) != nullptr) {
            throw InputError(fmt::format("{}.id: duplicate node id {}", nctx, spec.id));
        }
        state.add_node(std::move(spec));
    }
    return state;
}

json cluster_state_json(const ClusterState& state) {
    json nodes = json::array();
    for (const auto& n : state.nodes) {
        nodes.push_back({{"id", n.spec.id},
                         {"label", n.spec.label},
                         {"capacity_bytes", n.spec.capacity_bytes},
                         {"failure_probability", n.spec.failure_probability},
                         {"used_bytes", n.used_bytes},
                         {"alive", n.alive}});
    }
    json blocks = json::array();
    for (const auto& b : state.blocks) {
        blocks.push_back({{"id", b.id}, {"file_id", b.file_id}, {"size_bytes", b.size_bytes}});
    }
    json placements = json::array();
    for (const auto& p : state.placements) {
        placements.push_back({{"block_id", p.block_id}, {"holders", p.holder_node_ids}});
    }
    return {{"block_size_bytes", state.block_size_bytes},
            {"availability_target", state.availability_target},
            {"weight_basis", basis_name(state.weight_basis)},
            {"nodes", std::move(nodes)},
            {"blocks", std::move(blocks)},
            {"placements", std::move(placements)}};
}

json metrics_json(const MetricsReport& report) {
    json per_node = json::array();
    for (const auto& m : report.per_node) {
        per_node.push_back({{"node_id", m.node_id},
                            {"used_bytes", m.used_bytes},
                            {"dsu_percent", m.dsu_percent},
                            {"load_balance", m.load_balance}});
    }
    return {{"per_node", std::move(per_node)},
            {"cluster_used_bytes", report.cluster_used_bytes},
            {"cluster_capacity_bytes", report.cluster_capacity_bytes},
            {"cluster_dsu_percent", report.cluster_dsu_percent},
            {"min_load_balance", report.min_load_balance}};
}

const json& array_at(const json& obj, std::string_view key, std::string_view ctx) {
    const json& v = require(obj, key, ctx);
    if (!v.is_array()) throw InputError(fmt::format("{}: expected an array", join(ctx, key)));
    return v;
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(fmt::format("{}: cannot open", path.string()));
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(fmt::format("{}: cannot open for writing", path.string()));
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
}

ClusterState parse_cluster_config(std::string_view text) {
    return cluster_from_json(parse_json(text), "");
}

Scenario parse_scenario(std::string_view text) {
    const json root = parse_json(text);
    Scenario scenario;
    scenario.cluster = cluster_from_json(require(root, "cluster", ""), "cluster");

    const json& workload = array_at(root, "workload", "");
    for (std::size_t i = 0; i < workload.size(); ++i) {
        const std::string ctx = fmt::format("workload[{}]", i);
        FileSpec file;
        file.file_id = integer(require(workload[i], "file_id", ctx), ctx + ".file_id");
        file.size_bytes = scaled_bytes(require(workload[i], "size_mb", ctx), ctx + ".size_mb", kMiB);
        scenario.workload.push_back(file);
    }

    const json& mode = require(root, "replica_mode", "");
    if (mode == "optimum") {
        scenario.replica_mode = OptimumReplicas{};
    } else if (mode.is_object() && mode.contains("fixed")) {
        scenario.replica_mode = FixedReplicas{
            static_cast<int>(integer(mode.at("fixed"), "replica_mode.fixed"))};
    } else {
        throw InputError("replica_mode: expected \"optimum\" or {\"fixed\": k}");
    }

    const json& events = array_at(root, "events", "");
    for (std::size_t i = 0; i < events.size(); ++i) {
        const std::string ctx = fmt::format("events[{}]", i);
        const json& e = events[i];
        ScheduledEvent scheduled;
        scheduled.step = integer(require(e, "step", ctx), ctx + ".step");
        const int kinds = static_cast<int>(e.contains("ingest_file")) +
                          static_cast<int>(e.contains("kill_node")) +
                          static_cast<int>(e.contains("repair"));
        if (kinds != 1) {
            throw InputError(ctx + ": expected exactly one of ingest_file, kill_node, repair");
        }
        if (e.contains("ingest_file")) {
            scheduled.event = IngestFile{integer(e["ingest_file"], ctx + ".ingest_file")};
        } else if (e.contains("kill_node")) {
            scheduled.event = KillNode{integer(e["kill_node"], ctx + ".kill_node")};
        } else {
            if (e["repair"] != true) throw InputError(ctx + ".repair: expected true");
            scheduled.event = Repair{};
        }
        scenario.events.push_back(std::move(scheduled));
    }

    if (auto it = root.find("seed"); it != root.end()) {
        if (!it->is_number_unsigned()) throw InputError("seed: expected a non-negative integer");
        scenario.seed = it->get<std::uint64_t>();
    }
    validate_scenario(scenario);
    return scenario;
}

std::string state_to_json(const ClusterState& state) {
    return cluster_state_json(state).dump(2) + "\n";
}

ClusterState parse_state(std::string_view text) {
    json root = parse_json(text);
    std::string ctx;
    if (root.is_object() && root.contains("state")) {
        root = root["state"];
        ctx = "state";
    }
    ClusterState state;
    state.block_size_bytes = integer(require(root, "block_size_bytes", ctx), join(ctx, "block_size_bytes"));
    state.availability_target =
        number(require(root, "availability_target", ctx), join(ctx, "availability_target"));
    if (auto it = root.find("weight_basis"); it != root.end()) {
        state.weight_basis = parse_basis(*it, join(ctx, "weight_basis"));
    }

    const json& nodes = array_at(root, "nodes", ctx);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const std::string nctx = fmt::format("{}[{}]", join(ctx, "nodes"), i);
        const json& n = nodes[i];
        NodeState node;
        node.spec.id = integer(require(n, "id", nctx), nctx + ".id");
        node.spec.capacity_bytes = integer(require(n, "capacity_bytes", nctx), nctx + ".capacity_bytes");
        node.spec.failure_probability =
            number(require(n, "failure_probability", nctx), nctx + ".failure_probability");
        node.used_bytes = integer(require(n, "used_bytes", nctx), nctx + ".used_bytes");
        const json& alive = require(n, "alive", nctx);
        if (!alive.is_boolean()) throw InputError(nctx + ".alive: expected a boolean");
        node.alive = alive.get<bool>();
        if (auto it = n.find("label"); it != n.end() && it->is_string()) node.spec.label = it->get<std::string>();
        state.nodes.push_back(std::move(node));
    }

    const json& blocks = array_at(root, "blocks", ctx);
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const std::string bctx = fmt::format("{}[{}]", join(ctx, "blocks"), i);
        const json& b = blocks[i];
        state.blocks.push_back({integer(require(b, "id", bctx), bctx + ".id"),
                                integer(require(b, "file_id", bctx), bctx + ".file_id"),
                                integer(require(b, "size_bytes", bctx), bctx + ".size_bytes")});
    }

    const json& placements = array_at(root, "placements", ctx);
    for (std::size_t i = 0; i < placements.size(); ++i) {
        const std::string pctx = fmt::format("{}[{}]", join(ctx, "placements"), i);
        const json& p = placements[i];
        BlockPlacement placement;
        placement.block_id = integer(require(p, "block_id", pctx), pctx + ".block_id");
        const json& holders = array_at(p, "holders", pctx);
        for (std::size_t h = 0; h < holders.size(); ++h) {
            placement.holder_node_ids.push_back(
                integer(holders[h], fmt::format("{}.holders[{}]", pctx, h)));
        }
        state.placements.push_back(std::move(placement));
    }

    if (auto violations = validate_cluster(state); !violations.empty()) {
        throw InputError(fmt::format("{}: {}", ctx.empty() ? "<root>" : ctx, violations.front()));
    }
    return state;
}

std::string result_to_json(const ScenarioResult& result) {
    json shortfalls = json::array();
    for (const auto& s : result.shortfalls) {
        shortfalls.push_back({{"step", s.step}, {"block_id", s.block_id}, {"missing", s.missing}});
    }
    json out = {{"replica_count", result.replica_count},
                {"blocks_ingested", result.blocks_ingested},
                {"logical_bytes", result.logical_bytes},
                {"physical_bytes", result.physical_bytes()},
                {"shortfalls", std::move(shortfalls)},
                {"final_metrics", result.snapshots.empty()
                                      ? metrics_json(cluster_report(result.final_state))
                                      : metrics_json(result.snapshots.back().metrics)},
                {"state", cluster_state_json(result.final_state)}};
    return out.dump(2) + "\n";
}

std::string report_to_json(const MetricsReport& report) {
    return metrics_json(report).dump(2) + "\n";
}

}  // namespace replica::io
