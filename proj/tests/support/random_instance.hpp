// SPDX-License-Identifier: Apache-2.0
//
// Seeded small instances for property tests and the acceptance run.

#pragma once

#include <cstdint>
#include <random>

#include "fairoffload/energetics.hpp"
#include "fairoffload/model.hpp"

namespace fairoffload::testing {

struct RandomShape {
    int max_tasks = 6;
    int max_devices = 3;
    int max_edge = 2;
    int app_types = 2;
    // Scales every node capacity; small values force contention.
    double capacity_scale = 1.0;
};

inline Instance random_instance_once(std::mt19937_64& rng, const RandomShape& shape) {
    auto uni = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
    auto pick = [&](int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng); };

    Instance inst;
    inst.num_app_types = shape.app_types;
    inst.num_security_levels = 3;
    inst.multi_access_delay = 0.02;
    const int n_dev = pick(1, shape.max_devices);
    const int n_edge = pick(1, shape.max_edge);
    const int n_task = pick(1, shape.max_tasks);
    for (int d = 1; d <= n_dev; ++d) {
        UserEquipment ue;
        ue.id = d;
        ue.cpu_rate = uni(0.5, 2.0);
        ue.security_level = pick(1, 2);
        ue.weight = uni(0.3, 1.0);
        ue.chip_alpha = uni(0.5, 5.0) * 1e-18;
        ue.chip_gamma = 2.0;
        inst.devices.push_back(ue);
    }
    for (int j = 1; j <= n_edge; ++j) {
        EdgeNode n;
        n.id = j;
        n.uplink = uni(3.0, 20.0) * shape.capacity_scale;
        n.downlink = uni(1.0, 10.0) * shape.capacity_scale;
        n.compute = uni(0.5, 4.0) * shape.capacity_scale;
        n.security = pick(1, 3);
        for (int q = 1; q <= shape.app_types; ++q)
            if (pick(0, 3) > 0) n.supported_apps.push_back(q);
        n.backhaul = uni(3.0, 20.0) * shape.capacity_scale;
        n.per_task_backhaul_cap = uni(1.0, 6.0);
        inst.nodes.push_back(n);
    }
    EdgeNode cloud;
    cloud.id = n_edge + 1;
    cloud.uplink = uni(2.0, 12.0) * shape.capacity_scale;
    cloud.downlink = uni(1.0, 8.0) * shape.capacity_scale;
    cloud.compute = uni(1.0, 5.0) * shape.capacity_scale;
    cloud.security = pick(1, 3);
    for (int q = 1; q <= shape.app_types; ++q) cloud.supported_apps.push_back(q);
    inst.nodes.push_back(cloud);
    for (int q = 1; q <= shape.app_types; ++q) {
        inst.cloud.per_app_rate[q] = uni(4.0, 15.0);
        inst.cloud.per_app_security[q] = pick(1, 3);
    }
    for (int d = 1; d <= n_dev; ++d)
        for (int j = 1; j <= n_edge + 1; ++j) {
            if (pick(0, 9) == 0) continue;
            inst.links.push_back({d, j, uni(0.05, 0.7), uni(0.02, 0.4)});
        }
    for (int i = 1; i <= n_task; ++i) {
        Task t;
        t.id = i;
        t.ue_id = pick(1, n_dev);
        t.app_type = pick(1, shape.app_types);
        t.input_size = uni(1.0, 8.0);
        t.output_size = uni(0.1, 1.0);
        t.cycles_per_unit = uni(0.2, 1.0);
        t.deadline = uni(1.0, 6.0);
        t.security_req = pick(1, 3);
        inst.tasks.push_back(t);
    }
    return inst;
}

// Redraws until no task is aborted and the instance validates.
inline Instance random_instance(std::uint64_t seed, const RandomShape& shape = {}) {
    std::mt19937_64 rng(seed);
    for (;;) {
        Instance inst = random_instance_once(rng, shape);
        if (!validate(inst).empty()) continue;
        try {
            all_profiles(inst);
        } catch (const AbortedTask&) {
            continue;
        }
        return inst;
    }
}

}  // namespace fairoffload::testing
