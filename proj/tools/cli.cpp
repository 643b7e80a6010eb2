#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "replica/errors.hpp"
#include "replica/io.hpp"
#include "replica/metrics.hpp"
#include "replica/policy.hpp"
#include "replica/reliability.hpp"
#include "replica/simulator.hpp"

namespace replica::cli {

namespace {

namespace fs = std::filesystem;

std::shared_ptr<spdlog::logger> make_logger(std::ostream& err) {
    auto logger = std::make_shared<spdlog::logger>(
        "replica_planner", std::make_shared<spdlog::sinks::ostream_sink_mt>(err));
    logger->set_pattern("[%l] %v");
    logger->set_level(spdlog::level::err);
    if (const char* level = std::getenv("REPLICA_PLANNER_LOG")) {
        const std::string_view v(level);
        if (v == "info") logger->set_level(spdlog::level::info);
        else if (v == "debug") logger->set_level(spdlog::level::debug);
    }
    return logger;
}

void emit(const std::optional<std::string>& path, const std::string& contents, std::ostream& out) {
    if (path) {
        io::write_file(*path, contents);
    } else {
        out << contents;
    }
}

// ---------------------------------------------------------------- plan

struct PlanArgs {
    std::string cluster;
    std::optional<std::string> out;
    std::string format = "json";
};

int cmd_plan(const PlanArgs& args, std::ostream& out, spdlog::logger& log) {
    const ClusterState cluster = io::parse_cluster_config(io::read_file(args.cluster));
    log.info("loaded {} nodes from {}", cluster.nodes.size(), args.cluster);

    std::vector<double> fs;
    for (const auto& node : cluster.nodes) {
        if (node.alive) fs.push_back(node.spec.failure_probability);
    }
    if (fs.empty()) throw InputError("nodes: cluster has no data nodes");
    const ReplicaDecision decision =
        optimum_replica_count(cluster.availability_target, fs, static_cast<int>(fs.size()));

    const Block probe{0, 0, cluster.block_size_bytes};
    const std::vector<NodeId> placement = place_replicas(cluster, probe, decision.replica_count);
    log.debug("probe placement over {} candidates", cluster.nodes.size());

    out << fmt::format("replica_count: {}\n", decision.replica_count);
    out << fmt::format("achieved_availability: {:.4f}\n", decision.achieved_availability);
    out << fmt::format("mean_failure_probability: {:.4f}\n", decision.mean_failure_probability);
    out << fmt::format("availability_target: {:.4f}\n", cluster.availability_target);
    out << fmt::format("{:>8} {:>16} {:>20} {:>8} {:>20}\n", "node_id", "label", "free_bytes",
                       "f", "weight");
    for (const auto& node : cluster.nodes) {
        out << fmt::format("{:>8} {:>16} {:>20} {:>8.4f} {:>20.1f}\n", node.spec.id, node.spec.label,
                           node.free_bytes(), node.spec.failure_probability,
                           node_weight(node, cluster.weight_basis));
    }
    out << "probe_placement:";
    for (NodeId id : placement) out << ' ' << id;
    out << '\n';

    if (!args.out) return kOk;
    auto rank_of = [&](NodeId id) -> int {
        auto it = std::find(placement.begin(), placement.end(), id);
        return it == placement.end() ? -1 : static_cast<int>(it - placement.begin());
    };
    std::string contents;
    if (args.format == "csv") {
        contents = "node_id,label,free_bytes,failure_probability,weight,probe_rank,replica_count,"
                   "achieved_availability\n";
        for (const auto& node : cluster.nodes) {
            contents += fmt::format("{},{},{},{:.4f},{},{},{},{:.4f}\n", node.spec.id, node.spec.label,
                                    node.free_bytes(), node.spec.failure_probability,
                                    node_weight(node, cluster.weight_basis), rank_of(node.spec.id),
                                    decision.replica_count, decision.achieved_availability);
        }
    } else {
        nlohmann::json nodes = nlohmann::json::array();
        for (const auto& node : cluster.nodes) {
            nodes.push_back({{"id", node.spec.id},
                             {"label", node.spec.label},
                             {"free_bytes", node.free_bytes()},
                             {"failure_probability", node.spec.failure_probability},
                             {"weight", node_weight(node, cluster.weight_basis)}});
        }
        const nlohmann::json doc = {
            {"replica_count", decision.replica_count},
            {"achieved_availability", decision.achieved_availability},
            {"mean_failure_probability", decision.mean_failure_probability},
            {"availability_target", cluster.availability_target},
            {"probe_block_bytes", probe.size_bytes},
            {"placement", placement},
            {"nodes", std::move(nodes)}};
        contents = doc.dump(2) + "\n";
    }
    io::write_file(*args.out, contents);
    return kOk;
}

// ---------------------------------------------------------------- analyze

struct AnalyzeArgs {
    bool table2 = false;
    std::optional<std::string> params;
    std::vector<std::string> montecarlo;
    std::optional<std::string> out;
};

LossModelParams parse_params(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string part; std::getline(ss, part, ',');) parts.push_back(part);
    if (parts.size() != 4) throw InputError("--params: expected n,p,r,b");
    try {
        std::size_t pos = 0;
        LossModelParams params;
        auto whole = [&](const std::string& s) {
            const long long v = std::stoll(s, &pos);
            if (pos != s.size()) throw std::invalid_argument(s);
            return static_cast<int>(v);
        };
        auto real = [&](const std::string& s) {
            const double v = std::stod(s, &pos);
            if (pos != s.size()) throw std::invalid_argument(s);
            return v;
        };
        params.n = whole(parts[0]);
        params.p = real(parts[1]);
        params.r = whole(parts[2]);
        params.b = real(parts[3]);
        validate(params);
        return params;
    } catch (const DomainError& e) {
        throw InputError(fmt::format("--params: {}", e.what()));
    } catch (const std::logic_error&) {
        throw InputError(fmt::format("--params: cannot parse '{}'", text));
    }
}

int cmd_analyze(const AnalyzeArgs& args, std::ostream& out, spdlog::logger& log) {
    if (args.table2 == args.params.has_value()) {
        throw InputError("analyze: give exactly one of --table2 or --params");
    }
    if (args.table2) {
        if (!args.montecarlo.empty()) throw InputError("--montecarlo: requires --params");
        emit(args.out, table2_csv(table2_sweep(), true), out);
        return kOk;
    }

    const LossModelParams params = parse_params(*args.params);
    const double loss = data_loss_probability(params);
    std::string csv;
    if (args.montecarlo.empty()) {
        csv = "n,p,r,b,loss\n";
        csv += fmt::format("{},{:.4f},{},{},{:.4f}\n", params.n, params.p, params.r, params.b, loss);
    } else {
        std::int64_t trials = 0;
        std::uint64_t seed = 0;
        try {
            trials = std::stoll(args.montecarlo.at(0));
            seed = std::stoull(args.montecarlo.at(1));
        } catch (const std::logic_error&) {
            throw InputError("--montecarlo: expected <trials> <seed>");
        }
        if (trials < 1) throw InputError("--montecarlo: trials must be positive");
        MonteCarloEstimate mc;
        try {
            mc = monte_carlo_loss(params, trials, seed);
        } catch (const DomainError& e) {
            throw InputError(fmt::format("--montecarlo: {}", e.what()));
        }
        log.info("monte carlo: {} losses in {} trials", mc.losses, mc.trials);
        csv = "n,p,r,b,loss,mc_estimate,mc_standard_error\n";
        csv += fmt::format("{},{:.4f},{},{},{:.4f},{:.4f},{:.6f}\n", params.n, params.p, params.r,
                           params.b, loss, mc.estimate, mc.standard_error);
    }
    emit(args.out, csv, out);
    return kOk;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
    std::string scenario;
    std::string out;
};

int cmd_simulate(const SimulateArgs& args, std::ostream& out, spdlog::logger& log) {
    const Scenario scenario = io::parse_scenario(io::read_file(args.scenario));
    log.info("scenario {}: {} files, {} events", args.scenario, scenario.workload.size(),
             scenario.events.size());
    const ScenarioResult result = run_scenario(scenario);

    fs::create_directories(args.out);
    io::write_file(fs::path(args.out) / "timeseries.csv", timeseries_csv(result));
    io::write_file(fs::path(args.out) / "final_state.json", io::result_to_json(result));

    out << fmt::format("replica_count: {}\n", result.replica_count);
    out << fmt::format("events: {}\n", result.snapshots.size());
    out << fmt::format("blocks_ingested: {}\n", result.blocks_ingested);
    out << fmt::format("logical_bytes: {}\n", result.logical_bytes);
    out << fmt::format("physical_bytes: {}\n", result.physical_bytes());
    out << fmt::format("shortfalls: {}\n", result.shortfalls.size());
    return kOk;
}

// ---------------------------------------------------------------- report

struct ReportArgs {
    std::string state;
    std::optional<std::string> out;
};

int cmd_report(const ReportArgs& args, std::ostream& out, spdlog::logger& log) {
    const ClusterState state = io::parse_state(io::read_file(args.state));
    const MetricsReport report = cluster_report(state);
    log.info("report over {} nodes", report.per_node.size());

    if (args.out) {
        const bool json = fs::path(*args.out).extension() == ".json";
        io::write_file(*args.out, json ? io::report_to_json(report) : report_csv(report));
    } else {
        out << report_csv(report) << '\n';
    }
    out << fmt::format("cluster_used_bytes: {}\n", report.cluster_used_bytes);
    out << fmt::format("cluster_capacity_bytes: {}\n", report.cluster_capacity_bytes);
    out << fmt::format("cluster_dsu_percent: {:.4f}\n", report.cluster_dsu_percent);
    out << fmt::format("min_load_balance: {:.4f}\n", report.min_load_balance);
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    auto log = make_logger(err);

    CLI::App app{"Replica planning, data-loss analysis and cluster simulation", "replica_planner"};
    app.require_subcommand(1);

    PlanArgs plan;
    auto* plan_cmd = app.add_subcommand("plan", "Replica count and probe placement for a cluster");
    plan_cmd->add_option("--cluster", plan.cluster, "Cluster config (JSON)")->required();
    plan_cmd->add_option("--out", plan.out, "Output file");
    plan_cmd->add_option("--format", plan.format, "Output file format")
        ->check(CLI::IsMember({"csv", "json"}));

    AnalyzeArgs analyze;
    auto* analyze_cmd = app.add_subcommand("analyze", "Data-loss probability");
    analyze_cmd->add_flag("--table2", analyze.table2, "Sweep n x p at alpha 0.99");
    analyze_cmd->add_option("--params", analyze.params, "Single point n,p,r,b");
    analyze_cmd->add_option("--montecarlo", analyze.montecarlo, "<trials> <seed>")->expected(2);
    analyze_cmd->add_option("--out", analyze.out, "Output CSV file");

    SimulateArgs simulate;
    auto* simulate_cmd = app.add_subcommand("simulate", "Run a scenario file");
    simulate_cmd->add_option("--scenario", simulate.scenario, "Scenario (JSON)")->required();
    simulate_cmd->add_option("--out", simulate.out, "Output directory")->required();

    ReportArgs report;
    auto* report_cmd = app.add_subcommand("report", "Metrics for a saved cluster state");
    report_cmd->add_option("--state", report.state, "State JSON from simulate")->required();
    report_cmd->add_option("--out", report.out, "Output file (.json for JSON, CSV otherwise)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        return kInputError;
    }

    try {
        if (*plan_cmd) return cmd_plan(plan, out, *log);
        if (*analyze_cmd) return cmd_analyze(analyze, out, *log);
        if (*simulate_cmd) return cmd_simulate(simulate, out, *log);
        if (*report_cmd) return cmd_report(report, out, *log);
    } catch (const InputError& e) {
        log->error("{}", e.what());
        return kInputError;
    } catch (const DomainError& e) {
        log->error("{}", e.what());
        return kInputError;
    } catch (const UnreachableTarget& e) {
        log->error("UnreachableTarget: {}", e.what());
        return kInfeasible;
    } catch (const std::exception& e) {
        log->error("{}", e.what());
        return kFailure;
    }
    return kInputError;
}

}  // namespace replica::cli
