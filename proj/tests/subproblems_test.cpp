// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>

#include "fairoffload/subproblems.hpp"
#include "support/fixtures.hpp"

namespace fo = fairoffload;
using fo::Choice;

namespace {

fo::RelativeSize ref_edge_size() {
    fo::RelativeSize s;
    s.target = Choice::edge(1);
    s.up = 1.0 / 4.98;
    s.down = 0.1 / 4.98;
    s.cycles = 5.0;
    return s;
}

fo::RelativeSize ref_via_size() {
    fo::RelativeSize s;
    s.target = Choice::via(1);
    s.up = 1.0 / 4.48;
    s.down = 0.1 / 4.48;
    s.via = 1.1 / 4.48;
    return s;
}

fo::NodeAssignment edge_tasks(int n) {
    fo::NodeAssignment a;
    a.node_id = 1;
    for (int i = 1; i <= n; ++i) {
        a.edge_set.push_back(i);
        a.sizes[i] = ref_edge_size();
    }
    return a;
}

}  // namespace

TEST(Subproblems, PartitionMapsChoices) {
    fo::Instance inst = fo::testing::ref_instance(2, 1);
    auto profiles = fo::all_profiles(inst);
    auto parts = fo::partition({Choice::local(), Choice::local()}, inst, profiles);
    ASSERT_EQ(parts.size(), 2u);
    for (const auto& a : parts) EXPECT_TRUE(a.empty());

    parts = fo::partition({Choice::edge(1), Choice::via(1)}, inst, profiles);
    EXPECT_EQ(parts[0].edge_set, std::vector<int>{1});
    EXPECT_EQ(parts[0].cloud_set, std::vector<int>{2});
    EXPECT_TRUE(parts[1].empty());

    parts = fo::partition({Choice::edge(2), Choice::local()}, inst, profiles);
    EXPECT_EQ(parts[1].edge_set, std::vector<int>{1});
}

TEST(Subproblems, BalancedClosedForm) {
    fo::EdgeNode node = fo::testing::ref_edge(1);
    auto ff = fo::fast_feasible(edge_tasks(1), node);
    ASSERT_TRUE(ff);
    EXPECT_NEAR(ff->second, 0.524096, 1e-6);
    ASSERT_EQ(ff->first.size(), 1u);
    EXPECT_NEAR(ff->first[0].up, 10.0, 1e-12);
    EXPECT_NEAR(ff->first[0].down, 10.0, 1e-12);
    EXPECT_NEAR(ff->first[0].compute, 2.0, 1e-12);

    auto empty = fo::fast_feasible(fo::NodeAssignment{1, {}, {}, {}}, node);
    ASSERT_TRUE(empty);
    EXPECT_EQ(empty->second, 0.0);
    EXPECT_TRUE(empty->first.empty());

    EXPECT_FALSE(fo::fast_feasible(edge_tasks(2), node).has_value());
}

TEST(Subproblems, OverloadTest) {
    fo::EdgeNode node = fo::testing::ref_edge(1);
    EXPECT_TRUE(fo::fast_infeasible(edge_tasks(2), node));
    EXPECT_FALSE(fo::fast_infeasible(fo::NodeAssignment{1, {}, {}, {}}, node));
    fo::NodeAssignment via;
    via.node_id = 1;
    via.cloud_set = {1};
    via.sizes[1] = ref_via_size();
    EXPECT_FALSE(fo::fast_infeasible(via, node));
}

TEST(Subproblems, SolveUsesFastPaths) {
    fo::EdgeNode node = fo::testing::ref_edge(1);
    auto one = fo::solve_sp(edge_tasks(1), node);
    EXPECT_TRUE(one.feasible);
    EXPECT_EQ(one.fast_path, fo::FastPath::Balanced);
    EXPECT_NEAR(one.gamma, 0.524096, 1e-6);

    auto two = fo::solve_sp(edge_tasks(2), node);
    EXPECT_FALSE(two.feasible);
    EXPECT_EQ(two.fast_path, fo::FastPath::Overload);
}

TEST(Subproblems, MixedNodeNeedsTheSolver) {
    // One edge task and one forwarded task share only the uplink; the
    // summed ratios exceed 1 but each member reaches 0.7.
    fo::EdgeNode node;
    node.id = 1;
    node.uplink = 1.0;
    node.downlink = 1.0;
    node.compute = 1.0;
    node.backhaul = 1.0;
    fo::NodeAssignment a;
    a.node_id = 1;
    a.edge_set = {1};
    a.cloud_set = {2};
    fo::RelativeSize e;
    e.target = Choice::edge(1);
    e.up = 0.1;
    e.cycles = 5.0;
    fo::RelativeSize v;
    v.target = Choice::via(1);
    v.up = 0.1;
    v.via = 0.5;
    a.sizes[1] = e;
    a.sizes[2] = v;
    EXPECT_NEAR(fo::balanced_ratios(a, node).total(), 1.2, 1e-12);
    EXPECT_FALSE(fo::fast_feasible(a, node).has_value());
    EXPECT_FALSE(fo::fast_infeasible(a, node));
    auto sp = fo::solve_sp(a, node);
    EXPECT_TRUE(sp.feasible);
    EXPECT_EQ(sp.fast_path, fo::FastPath::None);
    EXPECT_NEAR(sp.gamma, 0.7, 1e-6);
    for (double b : fo::member_betas(a, sp.allocation)) EXPECT_LE(b, 0.7 + 1e-6);
}

TEST(Subproblems, BackhaulCapBindsForwardedTasks) {
    fo::EdgeNode node = fo::testing::ref_edge(1);
    fo::NodeAssignment a;
    a.node_id = 1;
    a.cloud_set = {1};
    a.sizes[1] = ref_via_size();
    auto free = fo::solve_sp(a, node);
    auto capped = fo::solve_sp(a, node, 1e-7, 1.0);
    ASSERT_TRUE(free.feasible);
    ASSERT_TRUE(capped.feasible);
    EXPECT_GT(capped.gamma, free.gamma);
    EXPECT_LE(capped.allocation[0].backhaul, 1.0 + 1e-6);
}

TEST(Subproblems, RatioBound) {
    EXPECT_TRUE(fo::ratio_bound_holds({1, 2}, {1, 1}));
    EXPECT_TRUE(fo::ratio_bound_holds({0, 0}, {1, 3}));
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    for (int k = 0; k < 500; ++k) {
        std::vector<double> p(4), q(4);
        for (int i = 0; i < 4; ++i) {
            p[static_cast<std::size_t>(i)] = u(rng);
            q[static_cast<std::size_t>(i)] = u(rng) + 1e-3;
        }
        EXPECT_TRUE(fo::ratio_bound_holds(p, q));
    }
}
