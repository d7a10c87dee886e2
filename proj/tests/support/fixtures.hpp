// SPDX-License-Identifier: Apache-2.0
//
// Hand-sized instances built around one reference task: 1 Mb up, 0.1 Mb
// down, 5 Gc/Mb, 5 s deadline, 20 ms access delay.

#pragma once

#include "fairoffload/model.hpp"

namespace fairoffload::testing {

inline Task ref_task(int id, int ue = 1, int app = 1) {
    Task t;
    t.id = id;
    t.ue_id = ue;
    t.app_type = app;
    t.input_size = 1.0;
    t.output_size = 0.1;
    t.cycles_per_unit = 5.0;
    t.deadline = 5.0;
    t.security_req = 1;
    return t;
}

// alpha chosen so a reference task costs 1 J locally at 1 Gc/s.
inline UserEquipment ref_device(int id, double cpu = 1.0) {
    UserEquipment d;
    d.id = id;
    d.cpu_rate = cpu;
    d.security_level = 1;
    d.weight = 1.0;
    d.chip_alpha = 2e-19;
    d.chip_gamma = 2.0;
    return d;
}

inline EdgeNode ref_edge(int id, double up = 10.0, double down = 10.0, double compute = 2.0) {
    EdgeNode n;
    n.id = id;
    n.uplink = up;
    n.downlink = down;
    n.compute = compute;
    n.security = 1;
    n.supported_apps = {1, 2, 3};
    n.backhaul = 100.0;
    return n;
}

// `devices` devices, `edges` edge nodes plus the cloud-direct node, WLAN
// links (0.142 J/Mb both ways) to every edge node and 3G links to the cloud.
inline Instance ref_instance(int tasks = 1, int edges = 1, int devices = 1) {
    Instance inst;
    inst.num_app_types = 3;
    inst.num_security_levels = 3;
    inst.multi_access_delay = 0.02;
    inst.utility_epsilon = 1e-9;
    for (int d = 1; d <= devices; ++d) inst.devices.push_back(ref_device(d));
    for (int j = 1; j <= edges; ++j) inst.nodes.push_back(ref_edge(j));
    EdgeNode cloud = ref_edge(edges + 1, 10.0, 10.0, 10.0);
    cloud.backhaul = 0.0;
    inst.nodes.push_back(cloud);
    for (int q = 1; q <= 3; ++q) {
        inst.cloud.per_app_rate[q] = 10.0;
        inst.cloud.per_app_security[q] = 1;
    }
    for (int d = 1; d <= devices; ++d) {
        for (int j = 1; j <= edges; ++j) inst.links.push_back({d, j, 0.142, 0.142});
        inst.links.push_back({d, edges + 1, 0.658, 0.278});
    }
    for (int i = 1; i <= tasks; ++i) inst.tasks.push_back(ref_task(i, (i - 1) % devices + 1));
    return inst;
}

// Removes every device's link to the cloud-direct node.
inline void drop_cloud_direct(Instance& inst) {
    std::erase_if(inst.links, [&](const LinkProfile& l) { return l.node_id == inst.cloud_node(); });
}

}  // namespace fairoffload::testing
