// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "fairoffload/fairness.hpp"
#include "support/fixtures.hpp"

namespace fo = fairoffload;
using fo::Choice;

TEST(Fairness, Jain) {
    EXPECT_DOUBLE_EQ(fo::jain({1, 1, 1, 1}), 1.0);
    EXPECT_DOUBLE_EQ(fo::jain({1, 0}), 0.5);
    EXPECT_DOUBLE_EQ(fo::jain({3, 1}), 0.8);
    EXPECT_THROW(fo::jain({0, 0}), fo::UndefinedIndex);
    EXPECT_THROW(fo::jain({}), fo::UndefinedIndex);
}

TEST(Fairness, MinMax) {
    EXPECT_DOUBLE_EQ(fo::minmax({1, 1}), 1.0);
    EXPECT_DOUBLE_EQ(fo::minmax({1, 0}), 0.0);
    EXPECT_DOUBLE_EQ(fo::minmax({0.75, 1}), 0.75);
    EXPECT_THROW(fo::minmax({0, 0}), fo::UndefinedIndex);
}

TEST(Fairness, LogUtilityGuard) {
    EXPECT_DOUBLE_EQ(fo::log_utility(1.0, 0.0, 1e-9), std::log(1e-9));
    EXPECT_TRUE(std::isinf(fo::log_utility(1.0, 0.0, 0.0)));
    EXPECT_DOUBLE_EQ(fo::log_utility(2.0, 1.0, 0.0), 0.0);
}

TEST(Fairness, LocalDecisionGivesEpsilonObjective) {
    fo::Instance inst = fo::testing::ref_instance(2, 1, 2);
    auto profiles = fo::all_profiles(inst);
    auto u = fo::utilities(inst, {Choice::local(), Choice::local()}, profiles);
    EXPECT_EQ(u.u, (std::vector<double>{0.0, 0.0}));
    EXPECT_DOUBLE_EQ(u.objective, 2.0 * std::log(1e-9));
}

TEST(Fairness, TwoDeviceObjective) {
    fo::Instance inst = fo::testing::ref_instance(2, 1, 2);
    inst.utility_epsilon = 0.0;
    auto profiles = fo::all_profiles(inst);
    auto u = fo::utilities(inst, {Choice::edge(1), Choice::edge(1)}, profiles);
    EXPECT_NEAR(u.u[0], 0.8438, 1e-12);
    EXPECT_NEAR(u.objective, 2.0 * std::log(0.8438), 1e-12);
    EXPECT_NEAR(u.objective, -0.339680, 1e-6);
    EXPECT_NEAR(fo::total_benefit(u), 2 * 0.8438, 1e-12);
}

TEST(Fairness, ScalingShiftsObjective) {
    fo::Instance inst = fo::testing::ref_instance(2, 1, 2);
    inst.utility_epsilon = 0.0;
    auto profiles = fo::all_profiles(inst);
    fo::OffloadDecision x{Choice::edge(1), Choice::via(1)};
    double base = fo::utilities(inst, x, profiles).objective;
    for (auto& p : profiles)
        for (auto& c : p.choices) c.delta *= 3.0;
    EXPECT_NEAR(fo::utilities(inst, x, profiles).objective, base + 2.0 * std::log(3.0), 1e-12);
}
