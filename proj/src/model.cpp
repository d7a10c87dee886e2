// SPDX-License-Identifier: Apache-2.0

#include "fairoffload/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace fairoffload {

using nlohmann::json;

bool EdgeNode::supports(int app_type) const {
    return std::find(supported_apps.begin(), supported_apps.end(), app_type) != supported_apps.end();
}

double CloudProfile::rate(int app_type) const {
    auto it = per_app_rate.find(app_type);
    return it == per_app_rate.end() ? 0.0 : it->second;
}

int CloudProfile::security(int app_type) const {
    auto it = per_app_security.find(app_type);
    return it == per_app_security.end() ? 1 : it->second;
}

int Instance::device_index(int ue_id) const {
    for (std::size_t i = 0; i < devices.size(); ++i)
        if (devices[i].id == ue_id) return static_cast<int>(i);
    return -1;
}

const UserEquipment& Instance::device(int ue_id) const {
    int k = device_index(ue_id);
    if (k < 0) throw InputError("unknown device " + std::to_string(ue_id));
    return devices[static_cast<std::size_t>(k)];
}

const LinkProfile* Instance::link(int ue_id, int node_id) const {
    for (const auto& l : links)
        if (l.ue_id == ue_id && l.node_id == node_id) return &l;
    return nullptr;
}

int Instance::task_index(int task_id) const {
    for (std::size_t i = 0; i < tasks.size(); ++i)
        if (tasks[i].id == task_id) return static_cast<int>(i);
    return -1;
}

std::string to_string(Choice c) {
    switch (c.kind) {
    case ChoiceKind::Local: return "local";
    case ChoiceKind::Edge: return "edge:" + std::to_string(c.node);
    case ChoiceKind::CloudVia: return "via:" + std::to_string(c.node);
    }
    return "?";
}

std::optional<Choice> parse_choice(const std::string& s) {
    if (s == "local") return Choice::local();
    auto colon = s.find(':');
    if (colon == std::string::npos) return std::nullopt;
    std::string head = s.substr(0, colon);
    int j = 0;
    try {
        j = std::stoi(s.substr(colon + 1));
    } catch (const std::exception&) {
        return std::nullopt;
    }
    if (head == "edge") return Choice::edge(j);
    if (head == "via") return Choice::via(j);
    return std::nullopt;
}

int choice_index(Choice c, int num_edge) {
    switch (c.kind) {
    case ChoiceKind::Local: return 0;
    case ChoiceKind::Edge: return c.node;
    case ChoiceKind::CloudVia: return num_edge + 1 + c.node;
    }
    return -1;
}

Choice choice_at(int index, int num_edge) {
    if (index == 0) return Choice::local();
    if (index <= num_edge + 1) return Choice::edge(index);
    return Choice::via(index - num_edge - 1);
}

namespace {

const json& field(const json& obj, const char* key, const std::string& path) {
    if (!obj.is_object()) throw InputError(path + ": expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw InputError(path + "." + key + ": missing field");
    return *it;
}

double get_number(const json& obj, const char* key, const std::string& path) {
    const json& v = field(obj, key, path);
    if (!v.is_number()) throw InputError(path + "." + key + ": expected a number");
    return v.get<double>();
}

int get_int(const json& obj, const char* key, const std::string& path) {
    const json& v = field(obj, key, path);
    if (!v.is_number_integer()) throw InputError(path + "." + key + ": expected an integer");
    return v.get<int>();
}

double number_or(const json& obj, const char* key, const std::string& path, double fallback) {
    if (!obj.contains(key)) return fallback;
    return get_number(obj, key, path);
}

const json& get_array(const json& obj, const char* key, const std::string& path) {
    const json& v = field(obj, key, path);
    if (!v.is_array()) throw InputError(path + "." + key + ": expected an array");
    return v;
}

template <class V>
std::map<int, V> keyed_map(const json& obj, const char* key, const std::string& path) {
    const json& v = field(obj, key, path);
    if (!v.is_object()) throw InputError(path + "." + key + ": expected an object keyed by app type");
    std::map<int, V> out;
    for (auto it = v.begin(); it != v.end(); ++it) {
        std::string where = path + "." + key + "." + it.key();
        int q = 0;
        try {
            std::size_t used = 0;
            q = std::stoi(it.key(), &used);
            if (used != it.key().size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw InputError(where + ": key is not an integer app type");
        }
        if (!it.value().is_number()) throw InputError(where + ": expected a number");
        out[q] = it.value().get<V>();
    }
    return out;
}

}  // namespace

Instance parse_instance(std::istream& in) {
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("parse error: ") + e.what());
    }
    if (!doc.is_object()) throw InputError("instance: top level must be an object");
    if (doc.contains("format") && (!doc["format"].is_number_integer() || doc["format"].get<int>() != 1))
        throw InputError("format: unsupported version");

    Instance inst;
    const json& params = field(doc, "params", "instance");
    inst.multi_access_delay = get_number(params, "multi_access_delay", "params");
    inst.num_security_levels = get_int(params, "num_security_levels", "params");
    inst.num_app_types = get_int(params, "num_app_types", "params");
    inst.utility_epsilon = number_or(params, "utility_epsilon", "params", 1e-9);

    const json& tasks = get_array(doc, "tasks", "instance");
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        std::string p = "tasks[" + std::to_string(i) + "]";
        Task t;
        t.id = get_int(tasks[i], "id", p);
        t.ue_id = get_int(tasks[i], "ue_id", p);
        t.app_type = get_int(tasks[i], "app_type", p);
        t.input_size = get_number(tasks[i], "input_size", p);
        t.output_size = get_number(tasks[i], "output_size", p);
        t.cycles_per_unit = get_number(tasks[i], "cycles_per_unit", p);
        t.deadline = get_number(tasks[i], "deadline", p);
        t.security_req = get_int(tasks[i], "security_req", p);
        inst.tasks.push_back(t);
    }

    const json& devices = get_array(doc, "devices", "instance");
    for (std::size_t i = 0; i < devices.size(); ++i) {
        std::string p = "devices[" + std::to_string(i) + "]";
        UserEquipment d;
        d.id = get_int(devices[i], "id", p);
        d.cpu_rate = get_number(devices[i], "cpu_rate", p);
        d.security_level = get_int(devices[i], "security_level", p);
        d.weight = number_or(devices[i], "weight", p, 1.0);
        d.chip_alpha = get_number(devices[i], "chip_alpha", p);
        d.chip_gamma = get_number(devices[i], "chip_gamma", p);
        inst.devices.push_back(d);
    }

    const json& nodes = get_array(doc, "nodes", "instance");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        std::string p = "nodes[" + std::to_string(i) + "]";
        EdgeNode n;
        n.id = get_int(nodes[i], "id", p);
        n.uplink = get_number(nodes[i], "uplink", p);
        n.downlink = get_number(nodes[i], "downlink", p);
        n.compute = get_number(nodes[i], "compute", p);
        n.security = get_int(nodes[i], "security", p);
        const json& apps = get_array(nodes[i], "supported_apps", p);
        for (const auto& a : apps) {
            if (!a.is_number_integer()) throw InputError(p + ".supported_apps: expected integers");
            n.supported_apps.push_back(a.get<int>());
        }
        n.backhaul = get_number(nodes[i], "backhaul", p);
        if (nodes[i].contains("per_task_backhaul_cap") && !nodes[i]["per_task_backhaul_cap"].is_null())
            n.per_task_backhaul_cap = get_number(nodes[i], "per_task_backhaul_cap", p);
        inst.nodes.push_back(n);
    }
    std::sort(inst.nodes.begin(), inst.nodes.end(), [](const EdgeNode& a, const EdgeNode& b) { return a.id < b.id; });
    for (std::size_t i = 0; i < inst.nodes.size(); ++i)
        if (inst.nodes[i].id != static_cast<int>(i) + 1)
            throw InputError("nodes: ids must be exactly 1..M+1, found id " + std::to_string(inst.nodes[i].id));
    if (inst.nodes.empty()) throw InputError("nodes: at least the cloud-direct node is required");

    const json& cloud = field(doc, "cloud", "instance");
    inst.cloud.per_app_rate = keyed_map<double>(cloud, "per_app_rate", "cloud");
    inst.cloud.per_app_security = keyed_map<int>(cloud, "per_app_security", "cloud");

    const json& links = get_array(doc, "links", "instance");
    for (std::size_t i = 0; i < links.size(); ++i) {
        std::string p = "links[" + std::to_string(i) + "]";
        LinkProfile l;
        l.ue_id = get_int(links[i], "ue_id", p);
        l.node_id = get_int(links[i], "node_id", p);
        l.e_up = get_number(links[i], "e_up", p);
        l.e_down = get_number(links[i], "e_down", p);
        inst.links.push_back(l);
    }

    std::set<int> device_ids;
    for (const auto& d : inst.devices)
        if (!device_ids.insert(d.id).second) throw InputError("devices: duplicate id " + std::to_string(d.id));
    std::set<int> task_ids;
    for (std::size_t i = 0; i < inst.tasks.size(); ++i) {
        const Task& t = inst.tasks[i];
        if (!task_ids.insert(t.id).second) throw InputError("tasks: duplicate id " + std::to_string(t.id));
        if (!device_ids.count(t.ue_id))
            throw InputError("tasks[" + std::to_string(i) + "].ue_id: dangling reference to device " +
                             std::to_string(t.ue_id));
    }
    std::set<std::pair<int, int>> link_keys;
    for (std::size_t i = 0; i < inst.links.size(); ++i) {
        const LinkProfile& l = inst.links[i];
        std::string p = "links[" + std::to_string(i) + "]";
        if (!device_ids.count(l.ue_id))
            throw InputError(p + ".ue_id: dangling reference to device " + std::to_string(l.ue_id));
        if (l.node_id < 1 || l.node_id > inst.cloud_node())
            throw InputError(p + ".node_id: dangling reference to node " + std::to_string(l.node_id));
        if (!link_keys.insert({l.ue_id, l.node_id}).second)
            throw InputError(p + ": duplicate profile for this device and node");
    }
    return inst;
}

Instance load_instance(std::istream& in) {
    Instance inst = parse_instance(in);
    auto diags = validate(inst);
    if (!diags.empty()) {
        std::string msg = "invalid instance:";
        for (const auto& d : diags) msg += "\n  " + d.entity + ": " + d.message;
        throw InputError(msg);
    }
    return inst;
}

Instance load_instance_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    return load_instance(in);
}

std::string serialize(const Instance& inst) {
    json doc;
    doc["format"] = 1;
    doc["params"] = {{"multi_access_delay", inst.multi_access_delay},
                     {"num_security_levels", inst.num_security_levels},
                     {"num_app_types", inst.num_app_types},
                     {"utility_epsilon", inst.utility_epsilon}};
    doc["tasks"] = json::array();
    for (const auto& t : inst.tasks)
        doc["tasks"].push_back({{"id", t.id},
                                {"ue_id", t.ue_id},
                                {"app_type", t.app_type},
                                {"input_size", t.input_size},
                                {"output_size", t.output_size},
                                {"cycles_per_unit", t.cycles_per_unit},
                                {"deadline", t.deadline},
                                {"security_req", t.security_req}});
    doc["devices"] = json::array();
    for (const auto& d : inst.devices)
        doc["devices"].push_back({{"id", d.id},
                                  {"cpu_rate", d.cpu_rate},
                                  {"security_level", d.security_level},
                                  {"weight", d.weight},
                                  {"chip_alpha", d.chip_alpha},
                                  {"chip_gamma", d.chip_gamma}});
    doc["nodes"] = json::array();
    for (const auto& n : inst.nodes) {
        json j = {{"id", n.id},
                  {"uplink", n.uplink},
                  {"downlink", n.downlink},
                  {"compute", n.compute},
                  {"security", n.security},
                  {"supported_apps", n.supported_apps},
                  {"backhaul", n.backhaul}};
        j["per_task_backhaul_cap"] = n.per_task_backhaul_cap ? json(*n.per_task_backhaul_cap) : json(nullptr);
        doc["nodes"].push_back(j);
    }
    json rates = json::object(), secs = json::object();
    for (const auto& [q, c] : inst.cloud.per_app_rate) rates[std::to_string(q)] = c;
    for (const auto& [q, s] : inst.cloud.per_app_security) secs[std::to_string(q)] = s;
    doc["cloud"] = {{"per_app_rate", rates}, {"per_app_security", secs}};
    doc["links"] = json::array();
    for (const auto& l : inst.links)
        doc["links"].push_back({{"ue_id", l.ue_id}, {"node_id", l.node_id}, {"e_up", l.e_up}, {"e_down", l.e_down}});
    return doc.dump(2) + "\n";
}

std::vector<Diagnostic> validate(const Instance& inst) {
    std::vector<Diagnostic> out;
    auto add = [&](std::string entity, std::string msg) { out.push_back({std::move(entity), std::move(msg)}); };
    const int S = inst.num_security_levels;
    const int Q = inst.num_app_types;
    auto level_ok = [S](int s) { return s >= 1 && s <= S; };
    auto app_ok = [Q](int q) { return q >= 1 && q <= Q; };

    if (S < 1) add("params", "num_security_levels must be at least 1");
    if (Q < 1) add("params", "num_app_types must be at least 1");
    if (!(inst.multi_access_delay >= 0.0)) add("params", "multi_access_delay must be nonnegative");
    if (!(inst.utility_epsilon >= 0.0)) add("params", "utility_epsilon must be nonnegative");

    for (const auto& t : inst.tasks) {
        std::string e = "task " + std::to_string(t.id);
        if (!(t.input_size > 0.0)) add(e, "input size must be positive");
        if (!(t.output_size >= 0.0)) add(e, "output size must be nonnegative");
        if (!(t.cycles_per_unit > 0.0)) add(e, "cycles per unit must be positive");
        if (!(t.deadline > 0.0)) add(e, "deadline must be positive");
        if (!level_ok(t.security_req)) add(e, "security requirement out of range");
        if (!app_ok(t.app_type)) add(e, "app type out of range");
        if (inst.device_index(t.ue_id) < 0) add(e, "references a missing device");
    }
    for (const auto& d : inst.devices) {
        std::string e = "device " + std::to_string(d.id);
        if (!(d.cpu_rate > 0.0)) add(e, "cpu rate must be positive");
        if (!(d.weight >= 0.0 && d.weight <= 1.0)) add(e, "weight must lie in [0, 1]");
        if (!(d.chip_gamma >= 1.0)) add(e, "chip gamma must be at least 1");
        if (!(d.chip_alpha > 0.0)) add(e, "chip alpha must be positive");
        if (!level_ok(d.security_level)) add(e, "security level out of range");
    }
    if (inst.nodes.empty()) add("nodes", "the cloud-direct node is missing");
    for (std::size_t i = 0; i < inst.nodes.size(); ++i) {
        const EdgeNode& n = inst.nodes[i];
        std::string e = "node " + std::to_string(n.id);
        if (n.id != static_cast<int>(i) + 1) add(e, "node ids must be 1..M+1 in order");
        if (!(n.uplink > 0.0)) add(e, "uplink capacity must be positive");
        if (!(n.downlink > 0.0)) add(e, "downlink capacity must be positive");
        if (!(n.compute > 0.0)) add(e, "compute capacity must be positive");
        if (!(n.backhaul >= 0.0)) add(e, "backhaul must be nonnegative");
        if (n.per_task_backhaul_cap && !(*n.per_task_backhaul_cap > 0.0))
            add(e, "per-task backhaul cap must be positive");
        if (!level_ok(n.security)) add(e, "security level out of range");
        for (int q : n.supported_apps)
            if (!app_ok(q)) add(e, "supported app type out of range");
        if (i + 1 == inst.nodes.size()) {
            if (n.backhaul != 0.0) add(e, "cloud-direct node must have zero backhaul");
            for (int q = 1; q <= Q; ++q)
                if (!n.supports(q)) {
                    add(e, "cloud-direct node must support every app type");
                    break;
                }
        }
    }
    for (int q = 1; q <= Q; ++q) {
        std::string e = "cloud app " + std::to_string(q);
        if (!(inst.cloud.rate(q) > 0.0)) add(e, "cloud rate must be positive");
        auto it = inst.cloud.per_app_security.find(q);
        if (it == inst.cloud.per_app_security.end() || !level_ok(it->second))
            add(e, "cloud security level missing or out of range");
    }
    std::set<std::pair<int, int>> seen;
    for (const auto& l : inst.links) {
        std::string e = "link " + std::to_string(l.ue_id) + "->" + std::to_string(l.node_id);
        if (inst.device_index(l.ue_id) < 0) add(e, "references a missing device");
        if (l.node_id < 1 || l.node_id > inst.cloud_node()) add(e, "references a missing node");
        if (!(l.e_up >= 0.0) || !(l.e_down >= 0.0)) add(e, "energy rates must be nonnegative");
        if (!seen.insert({l.ue_id, l.node_id}).second) add(e, "duplicate profile");
    }
    return out;
}

}  // namespace fairoffload
