#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "replica/errors.hpp"
#include "replica/io.hpp"
#include "test_support.hpp"

namespace replica {
namespace {

using nlohmann::json;

std::string error_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const InputError& e) {
        return e.what();
    }
    return "<no error>";
}

const char* kConfig = R"({
  "block_size_mb": 64, "availability_target": 0.99,
  "nodes": [
    {"id": 1, "capacity_gb": 80, "failure_probability": 0.01, "label": "DataNode1"},
    {"id": 2, "capacity_gb": 2.5, "failure_probability": 0.2}
  ]})";

TEST(ClusterConfig, Parses) {
    const ClusterState c = io::parse_cluster_config(kConfig);
    ASSERT_EQ(c.nodes.size(), 2u);
    EXPECT_EQ(c.block_size_bytes, 64 * kMiB);
    EXPECT_EQ(c.availability_target, 0.99);
    EXPECT_EQ(c.nodes[0].spec.capacity_bytes, 80 * kGiB);
    EXPECT_EQ(c.nodes[0].spec.label, "DataNode1");
    EXPECT_EQ(c.nodes[1].spec.capacity_bytes, 5 * kGiB / 2);
    EXPECT_EQ(c.nodes[1].spec.failure_probability, 0.2);
    EXPECT_EQ(c.weight_basis, WeightBasis::kFreeSpace);
    EXPECT_TRUE(validate_cluster(c).empty());
}

TEST(ClusterConfig, DefaultsAndBasis) {
    const ClusterState c = io::parse_cluster_config(
        R"({"availability_target": 0.9, "weight_basis": "total_capacity", "nodes": []})");
    EXPECT_EQ(c.block_size_bytes, kDefaultBlockSize);
    EXPECT_EQ(c.weight_basis, WeightBasis::kTotalCapacity);
}

TEST(ClusterConfig, ErrorsNameTheKey) {
    json doc = json::parse(kConfig);
    auto with = [&](auto mutate) {
        json copy = doc;
        mutate(copy);
        return error_of([&] { io::parse_cluster_config(copy.dump()); });
    };
    EXPECT_NE(with([](json& d) { d.erase("nodes"); }).find("nodes"), std::string::npos);
    EXPECT_NE(with([](json& d) { d.erase("availability_target"); }).find("availability_target"),
              std::string::npos);
    EXPECT_NE(with([](json& d) { d["nodes"][1].erase("capacity_gb"); }).find("nodes[1].capacity_gb"),
              std::string::npos);
    EXPECT_NE(with([](json& d) { d["nodes"][0]["failure_probability"] = 1.0; })
                  .find("nodes[0].failure_probability"),
              std::string::npos);
    EXPECT_NE(with([](json& d) { d["nodes"][1]["id"] = 1; }).find("nodes[1].id"), std::string::npos);
    EXPECT_NE(with([](json& d) { d["nodes"][0]["id"] = "one"; }).find("nodes[0].id"), std::string::npos);
    EXPECT_NE(with([](json& d) { d["block_size_mb"] = 0; }).find("block_size_mb"), std::string::npos);
    EXPECT_NE(with([](json& d) { d["weight_basis"] = "x"; }).find("weight_basis"), std::string::npos);
    EXPECT_NE(error_of([] { io::parse_cluster_config("{\"nodes\": ["); }).find("invalid JSON"),
              std::string::npos);
}

TEST(Scenario, ParsesPresetAndRejectsBadEvents) {
    const auto s = testing::load_preset("failure_repair.json");
    EXPECT_EQ(s.workload.size(), 10u);
    EXPECT_EQ(s.events.size(), 12u);
    EXPECT_EQ(s.events[10].event, Event{KillNode{2}});
    EXPECT_EQ(s.events[11].event, Event{Repair{}});
    EXPECT_EQ(s.replica_mode, ReplicaMode{OptimumReplicas{}});

    json doc = json::parse(io::read_file(testing::preset("fig6_factor3.json")));
    EXPECT_EQ(io::parse_scenario(doc.dump()).replica_mode, ReplicaMode{FixedReplicas{3}});

    auto with = [&](auto mutate) {
        json copy = doc;
        mutate(copy);
        return error_of([&] { io::parse_scenario(copy.dump()); });
    };
    EXPECT_NE(with([](json& d) { d["events"].push_back({{"step", 50}, {"kill_node", 9}}); })
                  .find("unknown node 9"),
              std::string::npos);
    EXPECT_NE(with([](json& d) { d["events"][0] = {{"step", 1}}; }).find("events[0]"), std::string::npos);
    EXPECT_NE(with([](json& d) { d["events"][0]["repair"] = true; }).find("events[0]"), std::string::npos);
    EXPECT_NE(with([](json& d) { d["replica_mode"] = "max"; }).find("replica_mode"), std::string::npos);
    EXPECT_NE(with([](json& d) { d["workload"][0].erase("size_mb"); }).find("workload[0].size_mb"),
              std::string::npos);
    EXPECT_NE(with([](json& d) { d.erase("cluster"); }).find("cluster"), std::string::npos);
    EXPECT_NE(with([](json& d) { d["cluster"].erase("nodes"); }).find("cluster.nodes"), std::string::npos);
}

TEST(State, RoundTripsThroughJson) {
    const auto result = run_scenario(testing::load_preset("failure_repair.json"));
    const ClusterState& state = result.final_state;
    EXPECT_EQ(io::parse_state(io::state_to_json(state)), state);
    // Simulation output nests the state; the loader accepts both shapes.
    EXPECT_EQ(io::parse_state(io::result_to_json(result)), state);
}

TEST(State, RejectsInconsistentOrTruncated) {
    const auto result = run_scenario(testing::load_preset("fig6_factor1.json"));
    json doc = json::parse(io::state_to_json(result.final_state));
    doc["nodes"][0]["used_bytes"] = 1;
    EXPECT_NE(error_of([&] { io::parse_state(doc.dump()); }).find("used bytes"), std::string::npos);

    const std::string text = io::state_to_json(result.final_state);
    EXPECT_THROW(io::parse_state(text.substr(0, text.size() / 2)), InputError);
    EXPECT_THROW(io::parse_state("{}"), InputError);
}

TEST(ReportJson, HasSummaryFields) {
    const auto result = run_scenario(testing::load_preset("fig8.json"));
    const json doc = json::parse(io::report_to_json(cluster_report(result.final_state)));
    EXPECT_EQ(doc["per_node"].size(), 4u);
    EXPECT_EQ(doc["cluster_used_bytes"].get<Bytes>(), result.physical_bytes());
    EXPECT_TRUE(doc.contains("min_load_balance"));
}

}  // namespace
}  // namespace replica
