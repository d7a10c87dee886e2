// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <sstream>

#include "fairoffload/bench.hpp"

namespace fo = fairoffload;

namespace {

int edge_count(const fo::Instance& inst) { return inst.num_edge(); }

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

}  // namespace

TEST(Bench, DeviceSweepRates) {
    fo::Instance inst = fo::generate({1, 1, {}}, 4);
    EXPECT_EQ(inst.devices.size(), 4u);
    EXPECT_EQ(inst.tasks.size(), 24u);
    for (int d = 1; d <= 4; ++d) {
        int owned = 0;
        for (const auto& t : inst.tasks) owned += t.ue_id == d;
        EXPECT_EQ(owned, 6);
        EXPECT_NEAR(inst.link(d, 1)->e_up, 0.071 + 0.01 * (d - 1), 1e-12);
    }
    EXPECT_TRUE(fo::validate(inst).empty());
}

TEST(Bench, ResourceSweepTotals) {
    fo::Instance inst = fo::generate({2, 1, {}}, 0.5);
    double up = 0, down = 0, comp = 0;
    for (int j = 1; j <= edge_count(inst); ++j) {
        up += inst.node(j).uplink;
        down += inst.node(j).downlink;
        comp += inst.node(j).compute;
    }
    EXPECT_NEAR(up, 108.0, 1e-9);
    EXPECT_NEAR(down, 108.0, 1e-9);
    EXPECT_NEAR(comp, 15.0, 1e-9);
}

TEST(Bench, TaskSweepSplitsEvenly) {
    fo::Instance inst = fo::generate({4, 1, {}}, 16);
    ASSERT_EQ(inst.devices.size(), 2u);
    int first = 0;
    for (const auto& t : inst.tasks) first += t.ue_id == 1;
    EXPECT_EQ(first, 8);
    EXPECT_EQ(inst.tasks.size(), 16u);
    fo::EdgeNode twin = inst.node(2);
    twin.id = 1;
    EXPECT_EQ(inst.node(1), twin);
}

TEST(Bench, UnknownScenario) {
    EXPECT_THROW(fo::generate({5, 1, {}}, 1), std::out_of_range);
    EXPECT_THROW(fo::default_points(0), std::out_of_range);
}

TEST(Bench, SolverNames) {
    for (auto s : {fo::SolverId::Dbbd, fo::SolverId::SwmGeneric, fo::SolverId::SwmSequentialFill, fo::SolverId::Oracle})
        EXPECT_EQ(fo::parse_solver(fo::to_string(s)), s);
    EXPECT_FALSE(fo::parse_solver("gurobi").has_value());
}

TEST(Bench, FairnessAtTwoDevices) {
    fo::Instance inst = fo::generate({1, 1, {}}, 2);
    auto d = fo::run_solver(inst, fo::SolverId::Dbbd);
    EXPECT_GE(*d.jain, 0.99);
    EXPECT_GE(*d.minmax, 0.99);
    for (double n : {2.0, 6.0}) {
        auto s = fo::run_solver(fo::generate({1, 1, {}}, n), fo::SolverId::SwmGeneric);
        EXPECT_EQ(*s.minmax, 0.0);
    }
}

TEST(Bench, LoadSplitAtSixteen) {
    fo::Instance inst = fo::generate({4, 1, {}}, 16);
    auto d = fo::run_solver(inst, fo::SolverId::Dbbd);
    auto per = d.offloaded_per_node(inst);
    EXPECT_EQ(per[0], 8);
    EXPECT_EQ(per[1], 8);
}

TEST(Bench, CsvIsReproducible) {
    fo::ScenarioSpec spec{4, 7, {2, 6}};
    fo::MatrixOptions opt;
    opt.timings = false;
    std::vector<fo::SolverId> solvers{fo::SolverId::Dbbd, fo::SolverId::SwmSequentialFill};
    std::string a = fo::run_matrix(spec, solvers, opt);
    std::string b = fo::run_matrix(spec, solvers, opt);
    EXPECT_EQ(a, b);
    auto rows = lines(a);
    ASSERT_EQ(rows.size(), 5u);
    EXPECT_EQ(rows[0], fo::csv_header());
    EXPECT_EQ(rows[1].rfind("2,dbbd,optimal,", 0), 0u);
    EXPECT_EQ(rows[1].substr(rows[1].size() - 2), ",0");
}
