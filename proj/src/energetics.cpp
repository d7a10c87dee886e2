// SPDX-License-Identifier: Apache-2.0

#include "fairoffload/energetics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace fairoffload {

namespace {

constexpr double kGiga = 1e9;

// Relative slack so that a deadline met exactly in exact arithmetic is met in floating point.
bool within_deadline(double delay, double deadline) { return delay <= deadline * (1.0 + 1e-12); }

double term(double numerator, double rate, const char* what) {
    if (numerator == 0.0) return 0.0;
    if (!(rate > 0.0)) throw ZeroRate(std::string("zero ") + what + " rate");
    return numerator / rate;
}

// Security, app support, reachability and budget; benefit is judged later.
Inadmissible target_qos(const Task& task, Choice target, const Instance& inst) {
    const int cloud = inst.cloud_node();
    const int j = target.node;
    if (j < 1 || j > cloud) return Inadmissible::Unreachable;
    if (!inst.link(task.ue_id, j)) return Inadmissible::Unreachable;
    const EdgeNode& node = inst.node(j);
    if (target.kind == ChoiceKind::Edge) {
        int level = j == cloud ? inst.cloud.security(task.app_type) : node.security;
        if (level > task.security_req) return Inadmissible::Security;
        if (j != cloud && !node.supports(task.app_type)) return Inadmissible::AppSupport;
    } else {
        if (j == cloud || !(node.backhaul > 0.0)) return Inadmissible::NoBackhaul;
        if (inst.cloud.security(task.app_type) > task.security_req) return Inadmissible::Security;
        if (!(inst.cloud.rate(task.app_type) > 0.0)) return Inadmissible::Unreachable;
    }
    if (!relative_size(task, target, inst.cloud, inst.multi_access_delay)) return Inadmissible::NoBudget;
    return Inadmissible::None;
}

std::vector<Choice> offload_targets(int num_edge) {
    std::vector<Choice> out;
    for (int j = 1; j <= num_edge + 1; ++j) out.push_back(Choice::edge(j));
    for (int j = 1; j <= num_edge + 1; ++j) out.push_back(Choice::via(j));
    return out;
}

}  // namespace

const char* to_string(Category c) {
    switch (c) {
    case Category::Cat1: return "cat1";
    case Category::Cat2: return "cat2";
    case Category::Cat3: return "cat3";
    case Category::Cat4: return "cat4";
    }
    return "?";
}

const char* to_string(Inadmissible r) {
    switch (r) {
    case Inadmissible::None: return "admissible";
    case Inadmissible::LocalQos: return "local-qos";
    case Inadmissible::Security: return "security";
    case Inadmissible::AppSupport: return "app-support";
    case Inadmissible::NoBudget: return "no-budget";
    case Inadmissible::Unreachable: return "unreachable";
    case Inadmissible::NoBackhaul: return "no-backhaul";
    case Inadmissible::PreLocal: return "pre-local";
    }
    return "?";
}

AbortedTask::AbortedTask(int id)
    : std::runtime_error("task " + std::to_string(id) + " meets QoS neither locally nor offloaded"), task_id(id) {}

std::vector<Choice> CostVectors::admissible_choices() const {
    std::vector<Choice> out;
    for (const auto& c : choices)
        if (c.admissible()) out.push_back(c.choice);
    return out;
}

LocalCost local_cost(const Task& task, const UserEquipment& ue) {
    LocalCost c;
    c.delay = task.work() / ue.cpu_rate;
    c.energy = ue.chip_alpha * std::pow(ue.cpu_rate * kGiga, ue.chip_gamma - 1.0) * (task.work() * kGiga);
    return c;
}

double offload_energy(const Task& task, const LinkProfile& link) {
    return link.e_up * task.input_size + link.e_down * task.output_size;
}

double delay(const Task& task, Choice choice, const AllocationRow& alloc, const CloudProfile& cloud, double zeta,
             const UserEquipment* ue) {
    if (choice.is_local()) {
        if (!ue) throw std::invalid_argument("local delay needs the owning device");
        return term(task.work(), ue->cpu_rate, "local cpu");
    }
    double t = term(task.input_size, alloc.up, "uplink") + term(task.output_size, alloc.down, "downlink") + zeta;
    if (choice.kind == ChoiceKind::Edge) return t + term(task.work(), alloc.compute, "compute");
    return t + term(task.input_size + task.output_size, alloc.backhaul, "backhaul") +
           term(task.work(), cloud.rate(task.app_type), "cloud");
}

std::optional<RelativeSize> relative_size(const Task& task, Choice target, const CloudProfile& cloud, double zeta) {
    if (target.is_local()) return std::nullopt;
    RelativeSize r;
    r.target = target;
    if (target.kind == ChoiceKind::Edge) {
        double budget = task.deadline - zeta;
        if (!(budget > 0.0)) return std::nullopt;
        r.up = task.input_size / budget;
        r.down = task.output_size / budget;
        r.cycles = task.cycles_per_unit;
        return r;
    }
    double c = cloud.rate(task.app_type);
    if (!(c > 0.0)) return std::nullopt;
    double budget = task.deadline - task.work() / c - zeta;
    if (!(budget > 0.0)) return std::nullopt;
    r.up = task.input_size / budget;
    r.down = task.output_size / budget;
    r.via = (task.input_size + task.output_size) / budget;
    return r;
}

Categorization categorize(const Task& task, const Instance& inst) {
    const UserEquipment& ue = inst.device(task.ue_id);
    LocalCost lc = local_cost(task, ue);
    Categorization out;
    out.local_ok = ue.security_level <= task.security_req && within_deadline(lc.delay, task.deadline);

    double e_min = std::numeric_limits<double>::infinity();
    double e_max = -std::numeric_limits<double>::infinity();
    for (Choice t : offload_targets(inst.num_edge())) {
        if (target_qos(task, t, inst) != Inadmissible::None) continue;
        double e = offload_energy(task, *inst.link(task.ue_id, t.node));
        e_min = std::min(e_min, e);
        e_max = std::max(e_max, e);
        out.offload_ok = true;
    }
    if (!out.local_ok && !out.offload_ok) throw AbortedTask(task.id);
    if (!out.local_ok) {
        out.category = Category::Cat4;
        out.e_base = e_max;
    } else if (!out.offload_ok) {
        out.category = Category::Cat2;
        out.e_base = lc.energy;
    } else {
        out.category = lc.energy - e_min > 0.0 ? Category::Cat3 : Category::Cat1;
        out.e_base = lc.energy;
    }
    return out;
}

CostVectors benefit_profile(const Task& task, const Instance& inst) {
    const int M = inst.num_edge();
    const double zeta = inst.multi_access_delay;
    Categorization cat = categorize(task, inst);
    CostVectors cv;
    cv.task_id = task.id;
    cv.category = cat.category;
    cv.e_base = cat.e_base;
    cv.local = local_cost(task, inst.device(task.ue_id));
    cv.choices.resize(static_cast<std::size_t>(choice_count(M)));

    ChoiceCost& local = cv.choices[0];
    local.choice = Choice::local();
    local.energy = cv.local.energy;
    local.delta = cv.e_base - cv.local.energy;
    local.reason = cat.category == Category::Cat4 ? Inadmissible::LocalQos : Inadmissible::None;

    double e_min = std::numeric_limits<double>::infinity();
    for (Choice t : offload_targets(M)) {
        ChoiceCost& cc = cv.choices[static_cast<std::size_t>(choice_index(t, M))];
        cc.choice = t;
        cc.reason = target_qos(task, t, inst);
        if (const LinkProfile* link = inst.link(task.ue_id, t.node)) cc.energy = offload_energy(task, *link);
        cc.delta = cv.e_base - cc.energy;
        if (t.kind == ChoiceKind::Edge) {
            cc.fixed_delay = zeta;
        } else {
            double c = inst.cloud.rate(task.app_type);
            cc.fixed_delay = zeta + (c > 0.0 ? task.work() / c : std::numeric_limits<double>::infinity());
        }
        cc.budget = task.deadline - cc.fixed_delay;
        cc.size = relative_size(task, t, inst.cloud, zeta);
        if (cc.reason == Inadmissible::None && !is_solver_task(cat.category)) cc.reason = Inadmissible::PreLocal;
        if (cc.admissible()) e_min = std::min(e_min, cc.energy);
    }

    if (is_solver_task(cat.category)) cv.delta_max = cv.e_base - e_min;
    if (task.deadline > zeta) cv.r_min = task.work() / (task.deadline - zeta);
    cv.rate = cv.r_min > 0.0 ? cv.delta_max / cv.r_min : 0.0;
    return cv;
}

std::vector<CostVectors> all_profiles(const Instance& inst) {
    std::vector<CostVectors> out;
    out.reserve(inst.tasks.size());
    for (const auto& t : inst.tasks) out.push_back(benefit_profile(t, inst));
    return out;
}

}  // namespace fairoffload
