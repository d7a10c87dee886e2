// SPDX-License-Identifier: Apache-2.0

#include "fairoffload/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace fairoffload {

namespace {

constexpr int kTasks = 24;
constexpr int kEdges = 3;
constexpr int kAppTypes = 5;
constexpr double kWlan = 0.071;
constexpr double kWlanStep = 0.01;
constexpr double k3gUp = 0.658;
constexpr double k3gDown = 0.278;
// Full edge totals that host all 24 default tasks.
constexpr double kTotalUp = 216.0, kTotalDown = 216.0, kTotalCompute = 30.0;

Task default_task(int id, int ue) {
    Task t;
    t.id = id;
    t.ue_id = ue;
    t.app_type = (id - 1) % kAppTypes + 1;
    t.input_size = 8.0;
    t.output_size = 0.8;
    t.cycles_per_unit = 0.625;
    t.deadline = 5.0;
    t.security_req = 1;
    return t;
}

UserEquipment default_device(int id) {
    UserEquipment d;
    d.id = id;
    d.cpu_rate = 1.0;
    d.security_level = 1;
    d.weight = 1.0;
    // Energy per cycle scaled so a default task costs 500 J locally.
    d.chip_alpha = 1e-16;
    d.chip_gamma = 2.0;
    return d;
}

EdgeNode edge(int id, double up, double down, double compute) {
    EdgeNode n;
    n.id = id;
    n.uplink = up;
    n.downlink = down;
    n.compute = compute;
    n.security = 1;
    for (int q = 1; q <= kAppTypes; ++q) n.supported_apps.push_back(q);
    n.backhaul = 100.0;
    n.per_task_backhaul_cap = 5.0;
    return n;
}

Instance skeleton() {
    Instance inst;
    inst.multi_access_delay = 0.02;
    inst.num_security_levels = 3;
    inst.num_app_types = kAppTypes;
    for (int q = 1; q <= kAppTypes; ++q) {
        inst.cloud.per_app_rate[q] = 10.0;
        inst.cloud.per_app_security[q] = 3;
    }
    return inst;
}

void add_cloud_node(Instance& inst) {
    EdgeNode c = edge(static_cast<int>(inst.nodes.size()) + 1, 100.0, 100.0, 10.0);
    c.security = 3;
    c.backhaul = 0.0;
    c.per_task_backhaul_cap.reset();
    inst.nodes.push_back(c);
}

void round_robin(Instance& inst, int tasks, int devices) {
    for (int n = 1; n <= devices; ++n) inst.devices.push_back(default_device(n));
    for (int t = 1; t <= tasks; ++t) inst.tasks.push_back(default_task(t, (t - 1) % devices + 1));
}

// Whole task slots go to the lowest node ids first; the fractional rest is shared equally.
std::vector<double> split_slots(double total_slots) {
    const int whole = static_cast<int>(std::floor(total_slots + 1e-9));
    const double rest = std::max(0.0, total_slots - whole);
    std::vector<double> out(kEdges, static_cast<double>(whole / kEdges));
    for (int j = 0; j < whole % kEdges; ++j) out[static_cast<std::size_t>(j)] += 1.0;
    for (double& s : out) s += rest / kEdges;
    return out;
}

std::string fmt(double v) {
    if (!std::isfinite(v)) return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

}  // namespace

std::vector<double> default_points(int scenario) {
    std::vector<double> p;
    switch (scenario) {
    case 1:
        for (int n = 2; n <= 12; ++n) p.push_back(n);
        break;
    case 2:
    case 3:
        for (int k = 1; k <= 10; ++k) p.push_back(k / 10.0);
        break;
    case 4:
        for (int n = 2; n <= 24; n += 2) p.push_back(n);
        break;
    default: throw std::out_of_range("scenario must be 1, 2, 3 or 4");
    }
    return p;
}

Instance generate(const ScenarioSpec& spec, double point) {
    Instance inst = skeleton();
    const double slot_up = kTotalUp / kTasks, slot_down = kTotalDown / kTasks, slot_compute = kTotalCompute / kTasks;
    auto wlan_links = [&](bool equal_rates) {
        for (const auto& d : inst.devices) {
            double e = equal_rates ? kWlan : kWlan + kWlanStep * (d.id - 1);
            for (const auto& n : inst.nodes) inst.links.push_back({d.id, n.id, e, e});
        }
    };
    switch (spec.id) {
    case 1: {
        const int n = static_cast<int>(std::lround(point));
        if (n < 2 || n > 12 || n != point) throw std::out_of_range("scenario 1 device count must be an integer in [2, 12]");
        round_robin(inst, kTasks, n);
        for (int j = 1; j <= kEdges; ++j)
            inst.nodes.push_back(edge(j, 0.5 * kTotalUp / kEdges, 0.5 * kTotalDown / kEdges, 0.5 * kTotalCompute / kEdges));
        add_cloud_node(inst);
        wlan_links(false);
        break;
    }
    case 2:
    case 3: {
        if (!(point >= 0.1 - 1e-12 && point <= 1.0 + 1e-12)) throw std::out_of_range("resource scale must lie in [0.1, 1]");
        round_robin(inst, kTasks, 4);
        auto slots = split_slots(kTasks * point);
        for (int j = 1; j <= kEdges; ++j) {
            double s = slots[static_cast<std::size_t>(j - 1)];
            inst.nodes.push_back(edge(j, s * slot_up, s * slot_down, s * slot_compute));
        }
        add_cloud_node(inst);
        wlan_links(spec.id == 3);
        break;
    }
    case 4: {
        const int n = static_cast<int>(std::lround(point));
        if (n < 2 || n > kTasks || n % 2 != 0 || n != point)
            throw std::out_of_range("scenario 4 task count must be an even integer in [2, 24]");
        round_robin(inst, n, 2);
        inst.nodes.push_back(edge(1, 108.0, 108.0, 15.0));
        inst.nodes.push_back(edge(2, 108.0, 108.0, 15.0));
        inst.nodes.push_back(edge(3, 72.0, 72.0, 10.0));
        add_cloud_node(inst);
        for (const auto& d : inst.devices)
            for (const auto& node : inst.nodes) {
                bool cellular = node.id == 3;
                inst.links.push_back({d.id, node.id, cellular ? k3gUp : kWlan, cellular ? k3gDown : kWlan});
            }
        break;
    }
    default: throw std::out_of_range("scenario must be 1, 2, 3 or 4");
    }
    return inst;
}

const char* to_string(SolverId s) {
    switch (s) {
    case SolverId::Dbbd: return "dbbd";
    case SolverId::SwmGeneric: return "swm-i";
    case SolverId::SwmSequentialFill: return "swm-b";
    case SolverId::Oracle: return "oracle";
    }
    return "?";
}

std::optional<SolverId> parse_solver(const std::string& s) {
    for (SolverId id : {SolverId::Dbbd, SolverId::SwmGeneric, SolverId::SwmSequentialFill, SolverId::Oracle})
        if (s == to_string(id)) return id;
    return std::nullopt;
}

SolveReport run_solver(const Instance& inst, SolverId solver, const SolveConfig& base) {
    switch (solver) {
    case SolverId::Dbbd: return solve(inst, base);
    case SolverId::SwmGeneric: return swm_solve(inst, BaselineKind::SwmGeneric, base);
    case SolverId::SwmSequentialFill: return swm_solve(inst, BaselineKind::SwmSequentialFill, base);
    case SolverId::Oracle: {
        OracleOptions o;
        o.tol = base.tol;
        o.backhaul_cap = base.backhaul_cap;
        return brute_force(inst, o);
    }
    }
    throw std::invalid_argument("unknown solver");
}

std::string csv_header() {
    return "point,solver,status,objective,jain,minmax,total_energy,benefit_min,benefit_max,offloaded_per_node,"
           "avg_delay,iterations,nodes_visited,wall_time";
}

std::string csv_row(double point, const SolveReport& r, const Instance& inst, const MatrixOptions& opt) {
    std::ostringstream os;
    const auto& u = r.utilities.u;
    double lo = u.empty() ? 0.0 : *std::min_element(u.begin(), u.end());
    double hi = u.empty() ? 0.0 : *std::max_element(u.begin(), u.end());
    os << fmt(point) << ',' << r.solver << ',' << to_string(r.status) << ',' << fmt(r.objective) << ','
       << (r.jain ? fmt(*r.jain) : "") << ',' << (r.minmax ? fmt(*r.minmax) : "") << ',' << fmt(r.total_energy) << ','
       << fmt(lo) << ',' << fmt(hi) << ',';
    auto counts = r.offloaded_per_node(inst);
    for (std::size_t j = 0; j < counts.size(); ++j) os << (j ? ";" : "") << counts[j];
    os << ',' << fmt(r.avg_delay) << ',' << r.iterations << ',' << r.nodes_visited << ','
       << (opt.timings ? fmt(r.wall_time) : "0");
    return os.str();
}

std::string run_matrix(const ScenarioSpec& spec, const std::vector<SolverId>& solvers, const MatrixOptions& opt) {
    std::vector<double> points = spec.points.empty() ? default_points(spec.id) : spec.points;
    std::sort(points.begin(), points.end());
    std::ostringstream os;
    os << csv_header() << '\n';
    for (double p : points) {
        Instance inst = generate(spec, p);
        for (SolverId s : solvers) {
            SolveReport r;
            try {
                r = run_solver(inst, s);
            } catch (const std::exception& e) {
                r.solver = to_string(s);
                r.diagnostic = e.what();
                os << fmt(p) << ',' << to_string(s) << ",error,,,,,,,,,,,\n";
                continue;
            }
            os << csv_row(p, r, inst, opt) << '\n';
        }
    }
    return os.str();
}

}  // namespace fairoffload
