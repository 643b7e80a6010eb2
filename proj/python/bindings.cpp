#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "replica/core_model.hpp"
#include "replica/errors.hpp"
#include "replica/io.hpp"
#include "replica/metrics.hpp"
#include "replica/policy.hpp"
#include "replica/reliability.hpp"
#include "replica/simulator.hpp"

#define STRINGIFY(x) #x
#define MACRO_STRINGIFY(x) STRINGIFY(x)

namespace py = pybind11;
using namespace replica;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Replica count selection, weighted placement, data-loss model and cluster simulation";

    py::register_exception<UnreachableTarget>(m, "UnreachableTarget", PyExc_RuntimeError);
    py::register_exception<InsufficientNodes>(m, "InsufficientNodes", PyExc_RuntimeError);
    py::register_exception<BlockTooLarge>(m, "BlockTooLarge", PyExc_RuntimeError);
    py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);

    m.attr("MiB") = kMiB;
    m.attr("GiB") = kGiB;

    // -- core model

    py::class_<NodeSpec>(m, "NodeSpec")
        .def(py::init([](NodeId id, Bytes capacity_bytes, double failure_probability,
                         std::string label) {
                 return NodeSpec{id, capacity_bytes, failure_probability, std::move(label)};
             }),
             py::arg("id"), py::arg("capacity_bytes"), py::arg("failure_probability"),
             py::arg("label") = "")
        .def_readwrite("id", &NodeSpec::id)
        .def_readwrite("capacity_bytes", &NodeSpec::capacity_bytes)
        .def_readwrite("failure_probability", &NodeSpec::failure_probability)
        .def_readwrite("label", &NodeSpec::label);

    py::class_<NodeState>(m, "NodeState")
        .def_readonly("spec", &NodeState::spec)
        .def_readonly("used_bytes", &NodeState::used_bytes)
        .def_readonly("alive", &NodeState::alive)
        .def_property_readonly("free_bytes", &NodeState::free_bytes);

    py::class_<Block>(m, "Block")
        .def(py::init([](BlockId id, FileId file_id, Bytes size_bytes) {
                 return Block{id, file_id, size_bytes};
             }),
             py::arg("id"), py::arg("file_id"), py::arg("size_bytes"))
        .def_readwrite("id", &Block::id)
        .def_readwrite("file_id", &Block::file_id)
        .def_readwrite("size_bytes", &Block::size_bytes);

    py::class_<BlockPlacement>(m, "BlockPlacement")
        .def_readonly("block_id", &BlockPlacement::block_id)
        .def_readonly("holder_node_ids", &BlockPlacement::holder_node_ids);

    py::class_<ClusterState>(m, "ClusterState")
        .def_readonly("nodes", &ClusterState::nodes)
        .def_readonly("blocks", &ClusterState::blocks)
        .def_readonly("placements", &ClusterState::placements)
        .def_readonly("block_size_bytes", &ClusterState::block_size_bytes)
        .def_readonly("availability_target", &ClusterState::availability_target)
        .def("commit",
             [](ClusterState& s, const Block& b, const std::vector<NodeId>& holders) {
                 s.commit(b, holders);
             })
        .def("set_alive", &ClusterState::set_alive)
        .def("to_json", [](const ClusterState& s) { return io::state_to_json(s); })
        .def_static("from_config_json", &io::parse_cluster_config)
        .def_static("from_state_json", &io::parse_state);

    m.def("make_cluster", &make_cluster, py::arg("nodes"),
          py::arg("block_size_bytes") = kDefaultBlockSize, py::arg("availability_target") = 0.99);
    m.def("validate_cluster", &validate_cluster);

    // -- policy

    py::class_<ReplicaDecision>(m, "ReplicaDecision")
        .def_readonly("replica_count", &ReplicaDecision::replica_count)
        .def_readonly("achieved_availability", &ReplicaDecision::achieved_availability)
        .def_readonly("mean_failure_probability", &ReplicaDecision::mean_failure_probability);

    m.def("node_availability", &node_availability, py::arg("failure_probability"));
    m.def("node_weight", py::overload_cast<Bytes, double>(&node_weight), py::arg("free_bytes"),
          py::arg("failure_probability"));
    m.def(
        "optimum_replica_count",
        [](double alpha, const std::vector<double>& fs, int max_replicas, bool accept_clamped) {
            return optimum_replica_count(alpha, fs, max_replicas, accept_clamped);
        },
        py::arg("availability_target"), py::arg("failure_probabilities"), py::arg("max_replicas"),
        py::arg("accept_clamped") = false);
    m.def("place_replicas", &place_replicas, py::arg("cluster"), py::arg("block"),
          py::arg("replica_count"));

    py::class_<RepairPlan>(m, "RepairPlan")
        .def_property_readonly("entries",
                               [](const RepairPlan& p) {
                                   std::vector<std::pair<BlockId, NodeId>> out;
                                   for (const auto& e : p.entries) out.emplace_back(e.block_id, e.node_id);
                                   return out;
                               })
        .def_property_readonly("shortfalls",
                               [](const RepairPlan& p) {
                                   std::vector<std::pair<BlockId, int>> out;
                                   for (const auto& s : p.shortfalls) out.emplace_back(s.block_id, s.missing);
                                   return out;
                               })
        .def_property_readonly("complete", &RepairPlan::complete);

    m.def("repair_plan", &repair_plan, py::arg("cluster"), py::arg("target_replica_count"));
    m.def("apply_repair", &apply_repair);

    // -- reliability

    py::class_<LossModelParams>(m, "LossModelParams")
        .def(py::init([](int n, double p, int r, double b) { return LossModelParams{n, p, r, b}; }),
             py::arg("n"), py::arg("p"), py::arg("r"), py::arg("b"))
        .def_readwrite("n", &LossModelParams::n)
        .def_readwrite("p", &LossModelParams::p)
        .def_readwrite("r", &LossModelParams::r)
        .def_readwrite("b", &LossModelParams::b);

    py::class_<MonteCarloEstimate>(m, "MonteCarloEstimate")
        .def_readonly("estimate", &MonteCarloEstimate::estimate)
        .def_readonly("standard_error", &MonteCarloEstimate::standard_error)
        .def_readonly("trials", &MonteCarloEstimate::trials)
        .def_readonly("losses", &MonteCarloEstimate::losses);

    py::class_<Table2Row>(m, "Table2Row")
        .def_readonly("n", &Table2Row::n)
        .def_readonly("alpha", &Table2Row::alpha)
        .def_readonly("p", &Table2Row::p)
        .def_readonly("r", &Table2Row::r)
        .def_readonly("loss", &Table2Row::loss)
        .def_readonly("published_loss", &Table2Row::published_loss);

    m.def("data_loss_probability", &data_loss_probability, py::arg("params"));
    m.def("monte_carlo_loss", &monte_carlo_loss, py::arg("params"), py::arg("trials"),
          py::arg("seed"), py::arg("threads") = 0, py::call_guard<py::gil_scoped_release>());
    m.def("table2_sweep", &table2_sweep);

    // -- metrics

    py::class_<NodeMetrics>(m, "NodeMetrics")
        .def_readonly("node_id", &NodeMetrics::node_id)
        .def_readonly("used_bytes", &NodeMetrics::used_bytes)
        .def_readonly("dsu_percent", &NodeMetrics::dsu_percent)
        .def_readonly("load_balance", &NodeMetrics::load_balance);

    py::class_<MetricsReport>(m, "MetricsReport")
        .def_readonly("per_node", &MetricsReport::per_node)
        .def_readonly("cluster_used_bytes", &MetricsReport::cluster_used_bytes)
        .def_readonly("cluster_capacity_bytes", &MetricsReport::cluster_capacity_bytes)
        .def_readonly("cluster_dsu_percent", &MetricsReport::cluster_dsu_percent)
        .def_readonly("min_load_balance", &MetricsReport::min_load_balance)
        .def("to_csv", &report_csv)
        .def("to_json", &io::report_to_json);

    m.def("disk_space_utilization", &disk_space_utilization, py::arg("used_bytes"),
          py::arg("capacity_bytes"));
    m.def("load_balance", &load_balance, py::arg("node_used"), py::arg("node_capacity"),
          py::arg("cluster_used"), py::arg("cluster_capacity"));
    m.def(
        "cluster_report",
        [](const ClusterState& c, bool include_dead) { return cluster_report(c, {include_dead}); },
        py::arg("cluster"), py::arg("include_dead") = true);

    // -- simulator

    py::class_<StepSnapshot>(m, "StepSnapshot")
        .def_readonly("step", &StepSnapshot::step)
        .def_readonly("metrics", &StepSnapshot::metrics);

    py::class_<ScenarioResult>(m, "ScenarioResult")
        .def_readonly("replica_count", &ScenarioResult::replica_count)
        .def_readonly("snapshots", &ScenarioResult::snapshots)
        .def_readonly("final_state", &ScenarioResult::final_state)
        .def_readonly("blocks_ingested", &ScenarioResult::blocks_ingested)
        .def_readonly("logical_bytes", &ScenarioResult::logical_bytes)
        .def_property_readonly("shortfall_count",
                               [](const ScenarioResult& r) { return r.shortfalls.size(); })
        .def_property_readonly("physical_bytes", &ScenarioResult::physical_bytes)
        .def("final_used_bytes", &ScenarioResult::final_used_bytes)
        .def("timeseries_csv", &timeseries_csv)
        .def("to_json", &io::result_to_json);

    m.def("split_into_blocks", &split_into_blocks, py::arg("file_id"), py::arg("file_size_bytes"),
          py::arg("block_size_bytes"), py::arg("first_block_id") = 0);
    m.def(
        "run_scenario_json",
        [](const std::string& text) { return run_scenario(io::parse_scenario(text)); },
        py::arg("scenario_json"));
    m.def(
        "failure_sweep_json",
        [](const std::string& text, NodeId node_id, const std::vector<double>& fs) {
            std::vector<std::pair<double, std::vector<std::pair<NodeId, Bytes>>>> out;
            for (auto& point : failure_sweep(io::parse_scenario(text), node_id, fs)) {
                out.emplace_back(point.failure_probability, std::move(point.used_bytes));
            }
            return out;
        },
        py::arg("scenario_json"), py::arg("node_id"), py::arg("f_values"));

#ifdef VERSION_INFO
    m.attr("__version__") = MACRO_STRINGIFY(VERSION_INFO);
#else
    m.attr("__version__") = "dev";
#endif
}
