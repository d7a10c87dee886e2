// SPDX-License-Identifier: Apache-2.0
//
// Domain types for the three-layer offloading network and the instance
// file format. Units are megabits, megabits/s, gigacycles, gigacycles/s,
// seconds and joules throughout; numbers are taken verbatim.

#pragma once

#include <compare>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fairoffload {

struct Task {
    int id = 0;
    int ue_id = 0;
    int app_type = 1;
    double input_size = 0.0;       // L^u, Mb
    double output_size = 0.0;      // L^d, Mb
    double cycles_per_unit = 0.0;  // w, Gc per Mb of input
    double deadline = 0.0;         // t^r, s
    int security_req = 1;          // s^r, 1 = strictest

    double work() const { return input_size * cycles_per_unit; }
    bool operator==(const Task&) const = default;
};

struct UserEquipment {
    int id = 0;
    double cpu_rate = 1.0;  // Gc/s
    int security_level = 1;
    double weight = 1.0;
    double chip_alpha = 1e-11;
    double chip_gamma = 2.0;

    bool operator==(const UserEquipment&) const = default;
};

struct LinkProfile {
    int ue_id = 0;
    int node_id = 0;
    double e_up = 0.0;    // J/Mb
    double e_down = 0.0;  // J/Mb

    bool operator==(const LinkProfile&) const = default;
};

struct EdgeNode {
    int id = 0;
    double uplink = 0.0;
    double downlink = 0.0;
    double compute = 0.0;
    int security = 1;
    std::vector<int> supported_apps;
    double backhaul = 0.0;
    std::optional<double> per_task_backhaul_cap;

    bool supports(int app_type) const;
    bool operator==(const EdgeNode&) const = default;
};

struct CloudProfile {
    std::map<int, double> per_app_rate;
    std::map<int, int> per_app_security;

    double rate(int app_type) const;
    int security(int app_type) const;
    bool operator==(const CloudProfile&) const = default;
};

// Nodes are stored by id 1..M+1; the last one is the direct cloud path.
struct Instance {
    std::vector<Task> tasks;
    std::vector<UserEquipment> devices;
    std::vector<EdgeNode> nodes;
    CloudProfile cloud;
    std::vector<LinkProfile> links;
    double multi_access_delay = 0.02;
    int num_security_levels = 3;
    int num_app_types = 1;
    double utility_epsilon = 1e-9;

    int num_edge() const { return static_cast<int>(nodes.size()) - 1; }
    int cloud_node() const { return static_cast<int>(nodes.size()); }
    const EdgeNode& node(int id) const { return nodes.at(static_cast<std::size_t>(id - 1)); }
    int device_index(int ue_id) const;
    const UserEquipment& device(int ue_id) const;
    const LinkProfile* link(int ue_id, int node_id) const;
    int task_index(int task_id) const;

    bool operator==(const Instance&) const = default;
};

enum class ChoiceKind { Local, Edge, CloudVia };

// Edge(M+1) is the direct cloud path.
struct Choice {
    ChoiceKind kind = ChoiceKind::Local;
    int node = 0;

    static Choice local() { return {ChoiceKind::Local, 0}; }
    static Choice edge(int j) { return {ChoiceKind::Edge, j}; }
    static Choice via(int j) { return {ChoiceKind::CloudVia, j}; }
    bool is_local() const { return kind == ChoiceKind::Local; }
    auto operator<=>(const Choice&) const = default;
};

std::string to_string(Choice c);
std::optional<Choice> parse_choice(const std::string& s);

// Dense index over the 2(M+1)+1 choices: local, Edge(1..M+1), CloudVia(1..M+1).
int choice_index(Choice c, int num_edge);
Choice choice_at(int index, int num_edge);
inline int choice_count(int num_edge) { return 2 * (num_edge + 1) + 1; }

// One entry per instance task, in instance order.
using OffloadDecision = std::vector<Choice>;

struct AllocationRow {
    int task_id = 0;
    int node_id = 0;
    double up = 0.0;
    double down = 0.0;
    double compute = 0.0;
    double backhaul = 0.0;
};

using Allocation = std::vector<AllocationRow>;

class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Diagnostic {
    std::string entity;
    std::string message;
};

// Structure and cross-references only.
Instance parse_instance(std::istream& in);
// parse_instance followed by validate; throws InputError on any diagnostic.
Instance load_instance(std::istream& in);
Instance load_instance_file(const std::string& path);
std::string serialize(const Instance& inst);

std::vector<Diagnostic> validate(const Instance& inst);

}  // namespace fairoffload
