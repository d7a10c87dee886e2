// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <sstream>

#include "fairoffload/model.hpp"
#include "support/fixtures.hpp"
#include "support/random_instance.hpp"

namespace fo = fairoffload;
using fo::testing::ref_instance;

namespace {

fo::Instance roundtrip(const fo::Instance& inst) {
    std::istringstream in(fo::serialize(inst));
    return fo::load_instance(in);
}

bool has_message(const std::vector<fo::Diagnostic>& d, const std::string& msg) {
    for (const auto& x : d)
        if (x.message == msg) return true;
    return false;
}

}  // namespace

TEST(Model, MinimalInstanceLoads) {
    fo::Instance inst = roundtrip(ref_instance());
    EXPECT_EQ(inst.tasks.size(), 1u);
    EXPECT_EQ(inst.num_edge(), 1);
    EXPECT_EQ(inst.cloud_node(), 2);
}

TEST(Model, ReferenceConstantsEchoVerbatim) {
    fo::Instance src = ref_instance();
    src.devices[0].chip_alpha = 1e-11;
    fo::Instance inst = roundtrip(src);
    const fo::Task& t = inst.tasks[0];
    EXPECT_EQ(t.input_size, 1.0);
    EXPECT_EQ(t.output_size, 0.1);
    EXPECT_EQ(t.cycles_per_unit, 5.0);
    EXPECT_EQ(t.deadline, 5.0);
    EXPECT_EQ(inst.multi_access_delay, 0.02);
    EXPECT_EQ(inst.devices[0].chip_alpha, 1e-11);
    EXPECT_EQ(inst.devices[0].chip_gamma, 2.0);
}

TEST(Model, DanglingDeviceReferenceIsRejected) {
    fo::Instance inst = ref_instance();
    inst.tasks[0].ue_id = 99;
    std::istringstream in(fo::serialize(inst));
    try {
        fo::load_instance(in);
        FAIL() << "expected InputError";
    } catch (const fo::InputError& e) {
        EXPECT_NE(std::string(e.what()).find("dangling reference"), std::string::npos);
    }
    EXPECT_TRUE(has_message(fo::validate(inst), "references a missing device"));
}

TEST(Model, ParseErrorsNameTheField) {
    std::istringstream broken("{\"params\": {\"multi_access_delay\": \"x\"}}");
    try {
        fo::parse_instance(broken);
        FAIL() << "expected InputError";
    } catch (const fo::InputError& e) {
        EXPECT_NE(std::string(e.what()).find("params.multi_access_delay"), std::string::npos);
    }
    std::istringstream garbage("{ not json");
    EXPECT_THROW(fo::parse_instance(garbage), fo::InputError);
    std::istringstream version("{\"format\": 2}");
    EXPECT_THROW(fo::parse_instance(version), fo::InputError);
}

TEST(Model, ValidateReportsEachViolation) {
    EXPECT_TRUE(fo::validate(ref_instance()).empty());

    fo::Instance zero = ref_instance();
    zero.tasks[0].deadline = 0.0;
    auto d = fo::validate(zero);
    ASSERT_EQ(d.size(), 1u);
    EXPECT_EQ(d[0].message, "deadline must be positive");
    EXPECT_EQ(d[0].entity, "task 1");

    fo::Instance bh = ref_instance();
    bh.nodes.back().backhaul = 5.0;
    d = fo::validate(bh);
    ASSERT_EQ(d.size(), 1u);
    EXPECT_EQ(d[0].message, "cloud-direct node must have zero backhaul");
}

TEST(Model, ChoiceIndexRoundTrips) {
    for (int m = 0; m <= 3; ++m)
        for (int k = 0; k < fo::choice_count(m); ++k) EXPECT_EQ(fo::choice_index(fo::choice_at(k, m), m), k);
    EXPECT_EQ(fo::choice_index(fo::Choice::local(), 2), 0);
    EXPECT_EQ(fo::choice_index(fo::Choice::edge(3), 2), 3);
    EXPECT_EQ(fo::choice_index(fo::Choice::via(1), 2), 4);
    for (fo::Choice c : {fo::Choice::local(), fo::Choice::edge(2), fo::Choice::via(1)})
        EXPECT_EQ(fo::parse_choice(fo::to_string(c)), c);
    EXPECT_FALSE(fo::parse_choice("edge:x").has_value());
}

TEST(Model, SerializeRoundTripsRandomInstances) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        fo::Instance inst = fo::testing::random_instance(seed);
        EXPECT_EQ(roundtrip(inst), inst) << "seed " << seed;
    }
}

TEST(Model, ValidateCollectsEveryViolation) {
    fo::Instance inst = ref_instance();
    inst.devices[0].weight = -1.0;
    inst.nodes[0].uplink = 0.0;
    inst.tasks[0].app_type = 9;
    inst.links.push_back(inst.links[0]);
    auto d = fo::validate(inst);
    EXPECT_TRUE(has_message(d, "weight must lie in [0, 1]"));
    EXPECT_TRUE(has_message(d, "uplink capacity must be positive"));
    EXPECT_TRUE(has_message(d, "app type out of range"));
    EXPECT_TRUE(has_message(d, "duplicate profile"));
}
