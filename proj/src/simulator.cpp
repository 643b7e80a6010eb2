#include "replica/simulator.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <fmt/format.h>

#include "replica/errors.hpp"

namespace replica {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

class Engine {
public:
    Engine(const Scenario& scenario, int replica_count)
        : scenario_(scenario), state_(scenario.cluster) {
        result_.replica_count = replica_count;
        for (const auto& block : state_.blocks) next_block_id_ = std::max(next_block_id_, block.id + 1);
    }

    ScenarioResult run() {
        for (const auto& scheduled : scenario_.events) {
            step_ = scheduled.step;
            std::visit(Overloaded{
                           [this](const IngestFile& e) { ingest(e.file_id); },
                           [this](const KillNode& e) { state_.set_alive(e.node_id, false); },
                           [this](const Repair&) { repair(); },
                       },
                       scheduled.event);
            result_.snapshots.push_back({step_, cluster_report(state_)});
        }
        result_.final_state = std::move(state_);
        return std::move(result_);
    }

private:
    void ingest(FileId file_id) {
        const auto& files = scenario_.workload;
        auto file = std::find_if(files.begin(), files.end(),
                                 [&](const FileSpec& f) { return f.file_id == file_id; });
        const int target = result_.replica_count;
        for (const Block& block :
             split_into_blocks(file_id, file->size_bytes, state_.block_size_bytes, next_block_id_)) {
            const int available = static_cast<int>(eligible_nodes(state_, block).size());
            const int count = std::min(target, available);
            std::vector<NodeId> holders;
            if (count > 0) holders = place_replicas(state_, block, count);
            state_.commit(block, holders);
            if (count < target) result_.shortfalls.push_back({step_, block.id, target - count});
            ++result_.blocks_ingested;
            next_block_id_ = block.id + 1;
        }
        result_.logical_bytes += file->size_bytes;
    }

    void repair() {
        const RepairPlan plan = repair_plan(state_, result_.replica_count);
        apply_repair(state_, plan);
        for (const auto& s : plan.shortfalls) result_.shortfalls.push_back({step_, s.block_id, s.missing});
    }

    const Scenario& scenario_;
    ClusterState state_;
    ScenarioResult result_;
    BlockId next_block_id_ = 0;
    std::int64_t step_ = 0;
};

}  // namespace

std::vector<std::pair<NodeId, Bytes>> ScenarioResult::final_used_bytes() const {
    std::vector<std::pair<NodeId, Bytes>> out;
    for (const auto& node : final_state.nodes) out.emplace_back(node.spec.id, node.used_bytes);
    return out;
}

Bytes ScenarioResult::physical_bytes() const {
    Bytes total = 0;
    for (const auto& node : final_state.nodes) total += node.used_bytes;
    return total;
}

std::vector<Block> split_into_blocks(FileId file_id, Bytes file_size_bytes, Bytes block_size_bytes,
                                     BlockId first_block_id) {
    if (file_size_bytes <= 0) {
        throw DomainError(fmt::format("file {}: size {} must be positive", file_id, file_size_bytes));
    }
    if (block_size_bytes <= 0) {
        throw DomainError(fmt::format("block size {} must be positive", block_size_bytes));
    }
    std::vector<Block> blocks;
    blocks.reserve(static_cast<std::size_t>((file_size_bytes + block_size_bytes - 1) / block_size_bytes));
    BlockId id = first_block_id;
    for (Bytes offset = 0; offset < file_size_bytes; offset += block_size_bytes) {
        blocks.push_back({id++, file_id, std::min(block_size_bytes, file_size_bytes - offset)});
    }
    return blocks;
}

void validate_scenario(const Scenario& scenario) {
    if (auto violations = validate_cluster(scenario.cluster); !violations.empty()) {
        throw InputError("cluster: " + violations.front());
    }
    if (const auto* fixed = std::get_if<FixedReplicas>(&scenario.replica_mode);
        fixed != nullptr && fixed->count < 1) {
        throw InputError(fmt::format("replica_mode: fixed count {} must be at least 1", fixed->count));
    }
    std::set<FileId> files;
    for (const auto& file : scenario.workload) {
        if (!files.insert(file.file_id).second) {
            throw InputError(fmt::format("workload: duplicate file_id {}", file.file_id));
        }
        if (file.size_bytes <= 0) {
            throw InputError(fmt::format("workload: file {} has non-positive size", file.file_id));
        }
    }
    std::set<FileId> ingested;
    std::optional<std::int64_t> last_step;
    for (const auto& scheduled : scenario.events) {
        if (last_step && scheduled.step <= *last_step) {
            throw InputError(fmt::format("events: step {} does not increase", scheduled.step));
        }
        last_step = scheduled.step;
        if (const auto* e = std::get_if<IngestFile>(&scheduled.event)) {
            if (files.count(e->file_id) == 0) {
                throw InputError(fmt::format("events: step {} ingest_file references unknown file {}",
                                             scheduled.step, e->file_id));
            }
            if (!ingested.insert(e->file_id).second) {
                throw InputError(fmt::format("events: step {} ingests file {} twice", scheduled.step,
                                             e->file_id));
            }
        } else if (const auto* k = std::get_if<KillNode>(&scheduled.event)) {
            if (scenario.cluster.find_node(k->node_id) == nullptr) {
                throw InputError(fmt::format("events: step {} kill_node references unknown node {}",
                                             scheduled.step, k->node_id));
            }
        }
    }
}

int resolve_replica_count(const Scenario& scenario) {
    if (const auto* fixed = std::get_if<FixedReplicas>(&scenario.replica_mode)) return fixed->count;
    std::vector<double> fs;
    for (const auto& node : scenario.cluster.nodes) {
        if (node.alive) fs.push_back(node.spec.failure_probability);
    }
    if (fs.empty()) throw InsufficientNodes("no alive nodes to size the replica factor against");
    return optimum_replica_count(scenario.cluster.availability_target, fs,
                                 static_cast<int>(fs.size()))
        .replica_count;
}

ScenarioResult run_scenario(const Scenario& scenario) {
    validate_scenario(scenario);
    return Engine(scenario, resolve_replica_count(scenario)).run();
}

std::vector<SweepPoint> failure_sweep(const Scenario& base, NodeId node_id,
                                      const std::vector<double>& f_values) {
    if (base.cluster.find_node(node_id) == nullptr) {
        throw InputError(fmt::format("sweep node {} not in cluster", node_id));
    }
    std::vector<SweepPoint> points;
    points.reserve(f_values.size());
    for (double f : f_values) {
        if (!(f >= 0.0 && f < 1.0)) {
            throw DomainError(fmt::format("sweep failure probability {} outside [0, 1)", f));
        }
        Scenario scenario = base;
        scenario.cluster.find_node(node_id)->spec.failure_probability = f;
        points.push_back({f, run_scenario(scenario).final_used_bytes()});
    }
    return points;
}

std::string timeseries_csv(const ScenarioResult& result) {
    std::string out = "step,node_id,used_bytes,dsu_percent,load_balance\n";
    for (const auto& snap : result.snapshots) {
        for (const auto& m : snap.metrics.per_node) {
            out += fmt::format("{},{},{},{},{}\n", snap.step, m.node_id, m.used_bytes, m.dsu_percent,
                               m.load_balance);
        }
    }
    return out;
}

}  // namespace replica
