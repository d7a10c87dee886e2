// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fairoffload/convexcore.hpp"

namespace fo = fairoffload;

namespace {

fo::PolytopeLogProgram box(int n) {
    fo::PolytopeLogProgram p;
    p.num_vars = n;
    p.lower.assign(static_cast<std::size_t>(n), 0.0);
    p.upper.assign(static_cast<std::size_t>(n), 1.0);
    return p;
}

// Optimum of one group's min-max allocation when it owns every resource.
double lone_gamma(const std::vector<double>& numerators, const std::vector<double>& caps) {
    double g = 0.0;
    for (std::size_t k = 0; k < numerators.size(); ++k) g += numerators[k] / caps[k];
    return g;
}

}  // namespace

TEST(ConvexCore, MonotoneLogPushesToBound) {
    fo::PolytopeLogProgram p = box(1);
    p.terms.push_back({1.0, {{0, 0.5}}, 0.5, 0.0});
    auto r = fo::maximize_log_polytope(p);
    ASSERT_EQ(r.status, fo::SolveStatus::Feasible);
    EXPECT_NEAR(r.x[0], 1.0, 1e-6);
    EXPECT_NEAR(r.value, 0.0, 1e-6);
    EXPECT_GE(r.bound, r.value - 1e-12);
    EXPECT_NEAR(r.bound, 0.0, 1e-6);
}

TEST(ConvexCore, SymmetricSplit) {
    fo::PolytopeLogProgram p = box(2);
    const double eps = 1e-9;
    p.terms.push_back({1.0, {{0, 1.0}}, 0.0, eps});
    p.terms.push_back({1.0, {{1, 1.0}}, 0.0, eps});
    p.inequalities.push_back({{{0, 1.0}, {1, 1.0}}, 1.0});
    auto r = fo::maximize_log_polytope(p);
    ASSERT_EQ(r.status, fo::SolveStatus::Feasible);
    EXPECT_NEAR(r.x[0], 0.5, 1e-6);
    EXPECT_NEAR(r.x[1], 0.5, 1e-6);
    EXPECT_NEAR(r.value, 2.0 * std::log(0.5), 1e-6);
    EXPECT_LE(r.kkt_residual, 1e-6);
}

TEST(ConvexCore, EmptyPolytope) {
    fo::PolytopeLogProgram p = box(1);
    p.terms.push_back({1.0, {{0, 1.0}}, 1.0, 0.0});
    p.inequalities.push_back({{{0, -1.0}}, -0.6});
    p.inequalities.push_back({{{0, 1.0}}, 0.4});
    EXPECT_EQ(fo::maximize_log_polytope(p).status, fo::SolveStatus::Infeasible);
}

TEST(ConvexCore, EqualityAndLinearTerms) {
    // max ln(x0) + ln(x1) + 0.5 x2, x0 + x1 + x2 = 1: optimum x2 = 0 unless the
    // marginal 1/x beats 0.5, which it does at x = 0.5.
    fo::PolytopeLogProgram p = box(3);
    p.terms.push_back({1.0, {{0, 1.0}}, 0.0, 0.0});
    p.terms.push_back({1.0, {{1, 1.0}}, 0.0, 0.0});
    p.linear = {0.0, 0.0, 0.5};
    p.equalities.push_back({{{0, 1.0}, {1, 1.0}, {2, 1.0}}, 1.0});
    auto r = fo::maximize_log_polytope(p);
    ASSERT_EQ(r.status, fo::SolveStatus::Feasible);
    EXPECT_NEAR(r.x[2], 0.0, 1e-6);
    EXPECT_NEAR(r.value, 2.0 * std::log(0.5), 1e-6);
}

TEST(ConvexCore, FixedVariablesAreSubstituted) {
    fo::PolytopeLogProgram p = box(2);
    p.lower[1] = p.upper[1] = 0.25;
    p.terms.push_back({1.0, {{0, 1.0}, {1, 1.0}}, 0.0, 0.0});
    p.inequalities.push_back({{{0, 1.0}, {1, 1.0}}, 0.75});
    auto r = fo::maximize_log_polytope(p);
    ASSERT_EQ(r.status, fo::SolveStatus::Feasible);
    EXPECT_EQ(r.x[1], 0.25);
    EXPECT_NEAR(r.x[0], 0.5, 1e-6);
    EXPECT_NEAR(r.value, std::log(0.75), 1e-6);
}

TEST(ConvexCore, LoneTaskTakesEveryResource) {
    fo::ReciprocalProgram p;
    p.num_groups = 1;
    p.capacity = {10.0, 10.0, 2.0};
    const double up = 1.0 / 4.98, down = 0.1 / 4.98, comp = 5.0 / 4.98;
    p.terms = {{0, 0, up, {}}, {0, 1, down, {}}, {0, 2, comp, {}}};
    auto r = fo::solve_reciprocal(p);
    ASSERT_EQ(r.status, fo::SolveStatus::Feasible);
    EXPECT_NEAR(r.gamma, 0.524096, 1e-6);
    EXPECT_NEAR(r.r[0], 10.0, 1e-6);
    EXPECT_NEAR(r.r[2], 2.0, 1e-6);

    fo::ReciprocalProgram two = p;
    two.num_groups = 2;
    two.terms.push_back({1, 0, up, {}});
    two.terms.push_back({1, 1, down, {}});
    two.terms.push_back({1, 2, comp, {}});
    auto r2 = fo::solve_reciprocal(two);
    EXPECT_NEAR(r2.gamma, 2.0 * r.gamma, 1e-6);

    fo::ReciprocalProgram zero;
    zero.num_groups = 1;
    zero.capacity = {1.0};
    zero.terms = {{0, 0, 0.0, {}}};
    EXPECT_EQ(fo::solve_reciprocal(zero).gamma, 0.0);
}

TEST(ConvexCore, SpectralAgreesWithBarrier) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.05, 2.0);
    for (int trial = 0; trial < 60; ++trial) {
        fo::ReciprocalProgram p;
        p.num_groups = 1 + trial % 4;
        p.capacity = {u(rng) * 3, u(rng) * 3, u(rng) * 3};
        for (int g = 0; g < p.num_groups; ++g)
            for (int k = 0; k < 3; ++k)
                if ((g + k + trial) % 5 != 0) p.terms.push_back({g, k, u(rng), {}});
        auto a = fo::solve_reciprocal_spectral(p);
        auto b = fo::solve_reciprocal_barrier(p);
        EXPECT_NEAR(a.gamma, b.gamma, 1e-6 * std::max(1.0, a.gamma)) << "trial " << trial;
        EXPECT_LE(a.lower_bound, a.gamma + 1e-9);
        for (std::size_t k = 0; k < p.capacity.size(); ++k) {
            double used = 0.0;
            for (std::size_t t = 0; t < p.terms.size(); ++t)
                if (p.terms[t].resource == static_cast<int>(k)) used += a.r[t];
            EXPECT_LE(used, p.capacity[k] * (1 + 1e-9));
        }
    }
}

TEST(ConvexCore, BarrierRespectsUpperBounds) {
    fo::ReciprocalProgram p;
    p.num_groups = 1;
    p.capacity = {100.0};
    p.terms = {{0, 0, 1.0, 5.0}};
    EXPECT_THROW(fo::solve_reciprocal_spectral(p), std::invalid_argument);
    auto r = fo::solve_reciprocal(p);
    EXPECT_NEAR(r.r[0], 5.0, 1e-6);
    EXPECT_NEAR(r.gamma, 0.2, 1e-6);
    EXPECT_NEAR(lone_gamma({1.0}, {5.0}), r.gamma, 1e-6);
}

TEST(ConvexCore, HessianClosedForm) {
    EXPECT_NEAR(fo::hessian_form_exact(1.0, 1.0, 1.0, 1.0), 0.0, 1e-15);
    EXPECT_NEAR(fo::hessian_form_exact(1.0, 2.0, 1.0, 0.0), 1.0, 1e-15);
    EXPECT_NEAR(fo::hessian_form_exact(3.0, 2.0, 1.5, 1.0), 0.0, 1e-15);
    EXPECT_NEAR(fo::hessian_form_fd(1.0, 2.0, 1.0, 0.0), 1.0, 1e-5);
}

TEST(ConvexCore, HessianSamplesArePsd) {
    auto rep = fo::verify_hessian_psd(2000, 3);
    EXPECT_EQ(rep.samples, 2000);
    EXPECT_GE(rep.min_form, -1e-8);
    EXPECT_TRUE(rep.violations.empty());
}
