// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "fairoffload/baselines.hpp"
#include "support/fixtures.hpp"
#include "support/random_instance.hpp"

namespace fo = fairoffload;
using fo::Choice;

namespace {

// Two devices with one task each; the edge node hosts one task and the
// cloud-direct node is barred.
fo::Instance one_slot(double e2) {
    fo::Instance inst = fo::testing::ref_instance(2, 1, 2);
    inst.nodes[0].compute = 1.5;
    for (auto& [q, s] : inst.cloud.per_app_security) s = 3;
    for (auto& l : inst.links)
        if (l.ue_id == 2 && l.node_id == 1) l.e_up = l.e_down = e2;
    return inst;
}

}  // namespace

TEST(Baselines, WelfareOffloadsCheaperDevice) {
    fo::Instance inst = one_slot(0.2);
    for (auto kind : {fo::BaselineKind::SwmGeneric, fo::BaselineKind::SwmSequentialFill}) {
        auto r = fo::swm_solve(inst, kind);
        ASSERT_EQ(r.status, fo::ReportStatus::Optimal);
        EXPECT_EQ(r.decision[0], Choice::edge(1));
        EXPECT_EQ(r.decision[1], Choice::local());
        EXPECT_NEAR(r.utilities.u[0], 1.0 - 0.1562, 1e-12);
        EXPECT_EQ(r.utilities.u[1], 0.0);
        EXPECT_EQ(r.solver, fo::to_string(kind));
    }
}

TEST(Baselines, TiedDevicesEqualEnergy) {
    fo::Instance inst = one_slot(0.142);
    auto a = fo::swm_solve(inst, fo::BaselineKind::SwmGeneric);
    auto b = fo::swm_solve(inst, fo::BaselineKind::SwmSequentialFill);
    EXPECT_NEAR(a.total_energy, b.total_energy, 1e-12);
}

TEST(Baselines, AmpleCapacityMatchesDbbd) {
    fo::Instance inst = fo::testing::ref_instance(4, 2, 2);
    for (auto& n : inst.nodes) n.compute = 50.0;
    auto d = fo::solve(inst);
    auto s = fo::swm_solve(inst, fo::BaselineKind::SwmGeneric);
    EXPECT_NEAR(d.total_energy, s.total_energy, 1e-9);
    EXPECT_NEAR(*d.jain, 1.0, 1e-9);
    EXPECT_NEAR(*s.jain, 1.0, 1e-9);
}

TEST(Baselines, OracleTinyEnumeration) {
    fo::Instance inst = fo::testing::ref_instance(1, 1);
    auto o = fo::brute_force(inst);
    ASSERT_EQ(o.status, fo::ReportStatus::Optimal);
    auto profiles = fo::all_profiles(inst);
    EXPECT_NEAR(o.objective, std::log(profiles[0].delta_max + 1e-9), 1e-12);
}

TEST(Baselines, OracleReportsInfeasible) {
    fo::Instance inst = fo::testing::ref_instance(2, 1);
    inst.devices[0].cpu_rate = 0.5;
    inst.nodes[0].backhaul = 0.0;
    fo::testing::drop_cloud_direct(inst);
    EXPECT_EQ(fo::brute_force(inst).status, fo::ReportStatus::Infeasible);
}

TEST(Baselines, OracleRefusesLargeInstances) {
    fo::Instance inst = fo::testing::ref_instance(9, 1);
    EXPECT_THROW(fo::brute_force(inst), fo::OracleSizeError);
}

TEST(Baselines, WelfareMatchesOracle) {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        fo::Instance inst = fo::testing::random_instance(300 + seed);
        fo::OracleOptions oo;
        oo.objective = fo::MasterObjective::Welfare;
        auto o = fo::brute_force(inst, oo);
        for (auto kind : {fo::BaselineKind::SwmGeneric, fo::BaselineKind::SwmSequentialFill}) {
            auto r = fo::swm_solve(inst, kind);
            ASSERT_EQ(r.status, o.status) << "seed " << seed;
            if (r.status == fo::ReportStatus::Optimal)
                EXPECT_NEAR(fo::total_benefit(r.utilities), fo::total_benefit(o.utilities), 1e-6) << "seed " << seed;
        }
    }
}

TEST(Baselines, GenericTieBreakIsLexicographic) {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        fo::Instance inst = fo::testing::random_instance(300 + seed);
        fo::OracleOptions oo;
        oo.objective = fo::MasterObjective::Welfare;
        auto o = fo::brute_force(inst, oo);
        auto r = fo::swm_solve(inst, fo::BaselineKind::SwmGeneric);
        if (r.status == fo::ReportStatus::Optimal) EXPECT_EQ(r.decision, o.decision) << "seed " << seed;
    }
}

TEST(Baselines, LexOrder) {
    fo::OffloadDecision a{Choice::edge(1), Choice::local()};
    fo::OffloadDecision b{Choice::local(), Choice::edge(1)};
    EXPECT_TRUE(fo::lex_smaller(a, b, 1));
    EXPECT_FALSE(fo::lex_smaller(b, a, 1));
    EXPECT_FALSE(fo::lex_smaller(a, a, 1));
}
