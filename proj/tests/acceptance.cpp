#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "replica/io.hpp"
#include "replica/metrics.hpp"
#include "replica/policy.hpp"
#include "replica/reliability.hpp"
#include "replica/simulator.hpp"

namespace {

using namespace replica;
using Clock = std::chrono::steady_clock;

struct Check {
    bool ok = true;
    std::string detail;

    void require(bool condition, const std::string& what) {
        if (!condition && ok) {
            ok = false;
            detail = what;
        }
    }
};

double elapsed_ms(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

Scenario preset(const std::string& name) {
    return io::parse_scenario(io::read_file(std::string(REPLICA_PRESET_DIR) + "/" + name));
}

Scenario workload_on(ClusterState cluster, ReplicaMode mode) {
    Scenario s;
    s.cluster = std::move(cluster);
    s.replica_mode = mode;
    for (FileId f = 1; f <= 10; ++f) {
        s.workload.push_back({f, 1000 * kMiB});
        s.events.push_back({f, IngestFile{f}});
    }
    return s;
}

ClusterState homogeneous(int nodes, Bytes capacity, double f) {
    std::vector<NodeSpec> specs;
    for (int i = 1; i <= nodes; ++i) specs.push_back({i, capacity, f, fmt::format("DataNode{}", i)});
    return make_cluster(std::move(specs));
}

Check replica_count() {
    Check c;
    const double ps[] = {0.01, 0.1, 0.2};
    const int expected[] = {2, 3, 3};
    const auto start = Clock::now();
    int got[3];
    for (int i = 0; i < 3; ++i) {
        const std::vector<double> fs(10, ps[i]);
        got[i] = optimum_replica_count(0.99, fs, 10).replica_count;
    }
    const double ms = elapsed_ms(start);
    for (int i = 0; i < 3; ++i) {
        c.require(got[i] == expected[i], fmt::format("p={} gave R={}", ps[i], got[i]));
    }
    c.require(ms < 1.0, fmt::format("took {:.3f} ms", ms));
    if (c.ok) c.detail = fmt::format("R = {}, {}, {} in {:.4f} ms", got[0], got[1], got[2], ms);
    return c;
}

Check ten_machine_losses() {
    Check c;
    const double b = 10 * kBlocksPerMachine;
    const LossModelParams params[] = {{10, 0.01, 2, b}, {10, 0.1, 3, b}, {10, 0.2, 3, b}};
    const double published[] = {0.0043, 0.0686, 0.3165};
    double got[3];
    const auto start = Clock::now();
    for (int i = 0; i < 3; ++i) got[i] = data_loss_probability(params[i]);
    const double ms = elapsed_ms(start);
    for (int i = 0; i < 3; ++i) {
        const double rel = std::abs(got[i] - published[i]) / published[i];
        c.require(rel <= 0.05, fmt::format("p={} loss {:.6f} is {:.2f}% from {}", params[i].p, got[i],
                                           100 * rel, published[i]));
    }
    c.require(ms < 10.0, fmt::format("took {:.3f} ms", ms));
    if (c.ok) c.detail = fmt::format("{:.4f}, {:.4f}, {:.4f} in {:.4f} ms", got[0], got[1], got[2], ms);
    return c;
}

Check sweep_shape() {
    Check c;
    const auto rows = table2_sweep();
    c.require(rows.size() == 9, fmt::format("{} rows", rows.size()));
    if (!c.ok) return c;
    for (const auto& row : rows) {
        c.require(row.loss >= 0.0 && row.loss <= 1.0, fmt::format("n={} p={} loss {}", row.n, row.p, row.loss));
    }
    for (std::size_t g = 0; g < 3; ++g) {
        for (std::size_t k = 0; k < 2; ++k) {
            const auto& a = rows[3 * g + k];
            const auto& b = rows[3 * g + k + 1];
            c.require(a.loss < b.loss, fmt::format("n={}: p={} not below p={}", a.n, a.p, b.p));
            const auto& lo = rows[3 * k + g];
            const auto& hi = rows[3 * (k + 1) + g];
            c.require(lo.loss < hi.loss, fmt::format("p={}: n={} not below n={}", lo.p, lo.n, hi.n));
        }
    }
    if (c.ok) c.detail = fmt::format("9 values in [{:.4f}, {:.4f}]", rows.front().loss, rows.back().loss);
    return c;
}

Check monte_carlo_grid() {
    Check c;
    const auto start = Clock::now();
    double worst = 0.0;
    int cells = 0;
    std::uint64_t seed = 1;
    for (int n : {3, 5, 8}) {
        for (int r : {1, 2, 3}) {
            for (int b : {1, 4, 10}) {
                for (double p : {0.1, 0.3, 0.5}) {
                    const LossModelParams params{n, p, r, static_cast<double>(b)};
                    const double exact = data_loss_probability(params);
                    const auto mc = monte_carlo_loss(params, 1'000'000, seed++);
                    const double gap = std::abs(mc.estimate - exact);
                    const double z = mc.standard_error > 0 ? gap / mc.standard_error : (gap == 0 ? 0 : INFINITY);
                    worst = std::max(worst, z);
                    ++cells;
                    c.require(z <= 4.0, fmt::format("n={} p={} r={} b={}: mc {:.6f} vs {:.6f} ({:.2f} SE)", n, p,
                                                    r, b, mc.estimate, exact, z));
                }
            }
        }
    }
    const double s = elapsed_ms(start) / 1000.0;
    c.require(s < 60.0, fmt::format("took {:.1f} s", s));
    if (c.ok) c.detail = fmt::format("{} cells, worst {:.2f} SE, {:.1f} s", cells, worst, s);
    return c;
}

Check weight_example() {
    Check c;
    const double w = node_weight(80 * kGiB, 0.2);
    c.require(w == static_cast<double>(64 * kGiB), fmt::format("weight {}", w));
    if (c.ok) c.detail = fmt::format("{} bytes", w);
    return c;
}

Check workload_totals() {
    Check c;
    for (int k : {1, 2, 3}) {
        const auto result = run_scenario(workload_on(homogeneous(4, 80 * kGiB, 0.01), FixedReplicas{k}));
        const double gib = static_cast<double>(result.logical_bytes) / static_cast<double>(kGiB);
        c.require(result.blocks_ingested == 160, fmt::format("k={}: {} blocks", k, result.blocks_ingested));
        c.require(gib == 9.765625, fmt::format("k={}: {} GiB logical", k, gib));
        c.require(result.physical_bytes() == k * result.logical_bytes,
                  fmt::format("k={}: physical {} vs logical {}", k, result.physical_bytes(), result.logical_bytes));
    }
    if (c.ok) c.detail = "160 blocks, 9.765625 GiB, physical = k x logical for k = 1, 2, 3";
    return c;
}

Check homogeneous_balance() {
    Check c;
    const auto result = run_scenario(workload_on(homogeneous(4, 80 * kGiB, 0.01), FixedReplicas{1}));
    const auto used = result.final_used_bytes();
    const auto [lo, hi] = std::minmax_element(used.begin(), used.end(),
                                              [](const auto& a, const auto& b) { return a.second < b.second; });
    const Bytes spread = hi->second - lo->second;
    c.require(spread <= 64 * kMiB, fmt::format("spread {} bytes", spread));
    const double bound = 1.0 - static_cast<double>(64 * kMiB) / static_cast<double>(80 * kGiB);
    double min_balance = 1.0;
    for (const auto& m : cluster_report(result.final_state).per_node) {
        min_balance = std::min(min_balance, m.load_balance);
    }
    c.require(min_balance >= bound, fmt::format("min load balance {:.8f} < {:.8f}", min_balance, bound));
    if (c.ok) c.detail = fmt::format("spread {} MiB, min balance {:.6f}", spread / kMiB, min_balance);
    return c;
}

Check degraded_node_trend() {
    Check c;
    std::vector<double> fs;
    for (int i = 1; i <= 10; ++i) fs.push_back(i / 100.0);
    const auto points = failure_sweep(preset("fig9.json"), 1, fs);
    std::vector<Bytes> used;
    for (const auto& point : points) {
        const auto it = std::find_if(point.used_bytes.begin(), point.used_bytes.end(),
                                     [](const auto& e) { return e.first == 1; });
        used.push_back(it->second);
    }
    for (std::size_t i = 1; i < used.size(); ++i) {
        c.require(used[i] <= used[i - 1],
                  fmt::format("f={}: {} > {}", points[i].failure_probability, used[i], used[i - 1]));
    }
    if (c.ok) c.detail = fmt::format("node 1 used {} MiB -> {} MiB", used.front() / kMiB, used.back() / kMiB);
    return c;
}

Check repair_restores() {
    Check c;
    std::vector<Scenario> scenarios{preset("failure_repair.json")};
    for (const char* base : {"fig7.json", "fig8.json", "fig9.json"}) {
        const Scenario s = preset(base);
        for (const auto& node : s.cluster.nodes) {
            Scenario killed = s;
            killed.events.push_back({100, KillNode{node.spec.id}});
            killed.events.push_back({101, Repair{}});
            scenarios.push_back(std::move(killed));
        }
    }
    for (std::size_t i = 0; i < scenarios.size(); ++i) {
        const auto result = run_scenario(scenarios[i]);
        const auto& state = result.final_state;
        c.require(result.shortfalls.empty(), fmt::format("scenario {}: {} shortfalls", i, result.shortfalls.size()));
        for (const auto& block : state.blocks) {
            const auto holders = state.alive_holder_count(*state.find_placement(block.id));
            c.require(static_cast<int>(holders) == result.replica_count,
                      fmt::format("scenario {}: block {} has {} alive holders, want {}", i, block.id, holders,
                                  result.replica_count));
        }
        const auto violations = validate_cluster(state);
        c.require(violations.empty(),
                  fmt::format("scenario {}: {}", i, violations.empty() ? "" : violations.front()));
    }
    if (c.ok) c.detail = fmt::format("{} kill+repair scenarios", scenarios.size());
    return c;
}

}  // namespace

int main() {
    const std::pair<const char*, std::function<Check()>> criteria[] = {
        {"1 replica-count reproduction", replica_count},
        {"2 ten-machine data-loss reproduction", ten_machine_losses},
        {"3 sweep monotone in n and p, bounded", sweep_shape},
        {"4 monte carlo agrees within 4 SE", monte_carlo_grid},
        {"5 weight example", weight_example},
        {"6 workload block and byte totals", workload_totals},
        {"7 homogeneous balance", homogeneous_balance},
        {"8 degraded node receives less", degraded_node_trend},
        {"9 repair restores replica count", repair_restores},
    };
    int failures = 0;
    for (const auto& [name, fn] : criteria) {
        Check c;
        try {
            c = fn();
        } catch (const std::exception& e) {
            c.ok = false;
            c.detail = fmt::format("exception: {}", e.what());
        }
        if (!c.ok) ++failures;
        fmt::print("{} {}: {}\n", c.ok ? "PASS" : "FAIL", name, c.detail);
    }
    fmt::print("{}/{} criteria passed\n", 9 - failures, 9);
    return failures == 0 ? 0 : 1;
}
