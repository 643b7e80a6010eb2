#include <gtest/gtest.h>

#include <random>

#include "replica/errors.hpp"
#include "replica/metrics.hpp"
#include "replica/policy.hpp"
#include "test_support.hpp"

namespace replica {
namespace {

using testing::cluster_of;

TEST(DiskSpaceUtilization, Examples) {
    EXPECT_EQ(disk_space_utilization(0, 80 * kGiB), 0.0);
    EXPECT_EQ(disk_space_utilization(80 * kGiB, 80 * kGiB), 100.0);
    EXPECT_EQ(disk_space_utilization(40 * kGiB, 80 * kGiB), 50.0);
    EXPECT_THROW(disk_space_utilization(1, 0), DomainError);
    EXPECT_THROW(disk_space_utilization(2, 1), DomainError);
    EXPECT_THROW(disk_space_utilization(-1, 1), DomainError);
}

TEST(LoadBalance, Examples) {
    EXPECT_EQ(load_balance(3, 10, 30, 100), 1.0);
    EXPECT_DOUBLE_EQ(load_balance(5, 10, 3, 10), 0.8);
    EXPECT_DOUBLE_EQ(load_balance(0, 8, 1, 4), 0.75);
    EXPECT_THROW(load_balance(1, 0, 1, 1), DomainError);
    EXPECT_THROW(load_balance(1, 1, 2, 1), DomainError);
}

TEST(LoadBalanceProperty, ScaleInvariant) {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 1000; ++i) {
        const Bytes nc = 1 + static_cast<Bytes>(rng() % 1000);
        const Bytes cc = 1 + static_cast<Bytes>(rng() % 1000);
        const Bytes nu = static_cast<Bytes>(rng() % (nc + 1));
        const Bytes cu = static_cast<Bytes>(rng() % (cc + 1));
        const Bytes k = 1 + static_cast<Bytes>(rng() % 1000);
        const double base = load_balance(nu, nc, cu, cc);
        EXPECT_NEAR(load_balance(nu * k, nc * k, cu * k, cc * k), base, 1e-15);
        EXPECT_GE(base, 0.0);
        EXPECT_LE(base, 1.0);
    }
}

TEST(ClusterReport, EmptyCluster) {
    const auto report = cluster_report(cluster_of({80, 80, 250}, {0.01, 0.02, 0.03}));
    ASSERT_EQ(report.per_node.size(), 3u);
    for (const auto& m : report.per_node) {
        EXPECT_EQ(m.dsu_percent, 0.0);
        EXPECT_EQ(m.load_balance, 1.0);
    }
    EXPECT_EQ(report.cluster_dsu_percent, 0.0);
    EXPECT_EQ(report.min_load_balance, 1.0);
    EXPECT_EQ(report.cluster_capacity_bytes, 410 * kGiB);
}

TEST(ClusterReport, NoNodes) {
    const auto report = cluster_report(ClusterState{});
    EXPECT_TRUE(report.per_node.empty());
    EXPECT_EQ(report.min_load_balance, 1.0);
}

TEST(ClusterReport, SingleNodeAlwaysBalanced) {
    ClusterState c = cluster_of({1}, {0.1});
    for (BlockId b = 0; b < 10; ++b) {
        c.commit({b, 0, 37 * kMiB}, std::vector<NodeId>{0});
        EXPECT_EQ(cluster_report(c).per_node[0].load_balance, 1.0);
    }
}

TEST(ClusterReport, TotalsAndDeadNodes) {
    ClusterState c = cluster_of({1, 2}, {0.0, 0.0});
    c.commit({0, 0, 64 * kMiB}, std::vector<NodeId>{0, 1});
    c.commit({1, 0, 64 * kMiB}, std::vector<NodeId>{1});
    c.set_alive(1, false);

    const auto all = cluster_report(c);
    EXPECT_EQ(all.cluster_used_bytes, 192 * kMiB);
    EXPECT_EQ(all.cluster_capacity_bytes, 3 * kGiB);
    double weighted = 0.0;
    for (std::size_t i = 0; i < all.per_node.size(); ++i) {
        weighted += all.per_node[i].dsu_percent * static_cast<double>(c.nodes[i].spec.capacity_bytes);
    }
    EXPECT_NEAR(weighted / static_cast<double>(all.cluster_capacity_bytes), all.cluster_dsu_percent,
                1e-12);
    EXPECT_DOUBLE_EQ(all.cluster_dsu_percent, 192.0 * 100.0 / 3072.0);

    const auto alive_only = cluster_report(c, {.include_dead = false});
    ASSERT_EQ(alive_only.per_node.size(), 1u);
    EXPECT_EQ(alive_only.cluster_capacity_bytes, kGiB);
    EXPECT_EQ(alive_only.per_node[0].load_balance, 1.0);
}

TEST(ClusterReport, HomogeneousFillBound) {
    ClusterState c = cluster_of({2, 2, 2, 2}, {0.05, 0.05, 0.05, 0.05});
    std::mt19937_64 rng(1);
    for (BlockId b = 0; b < 100; ++b) {
        const Block block{b, 0, static_cast<Bytes>(1 + rng() % c.block_size_bytes)};
        c.commit(block, place_replicas(c, block, 1));
        const auto report = cluster_report(c);
        EXPECT_GE(report.min_load_balance,
                  1.0 - static_cast<double>(c.block_size_bytes) / static_cast<double>(2 * kGiB));
    }
}

TEST(ReportCsv, RoundTrips) {
    ClusterState c = cluster_of({80, 80, 250}, {0.01, 0.02, 0.03});
    for (BlockId b = 0; b < 37; ++b) {
        const Block block{b, 0, 13 * kMiB + b};
        c.commit(block, place_replicas(c, block, 2));
    }
    const auto report = cluster_report(c);
    EXPECT_EQ(parse_report_csv(report_csv(report)), report.per_node);
    EXPECT_THROW(parse_report_csv("node,used\n"), InputError);
    EXPECT_THROW(parse_report_csv("node_id,used_bytes,dsu_percent,load_balance\n1,2,x,4\n"), InputError);
}

}  // namespace
}  // namespace replica
