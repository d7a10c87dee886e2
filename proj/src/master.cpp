// SPDX-License-Identifier: Apache-2.0

#include "fairoffload/master.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>

#include "fairoffload/fairness.hpp"

namespace fairoffload {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct CompiledTerm {
    int slot;
    int choice;
    double coeff;
};

struct CompiledRow {
    std::vector<CompiledTerm> terms;
    double rhs;
};

std::vector<CompiledRow> compile(const MasterContext& ctx, const CutPool& pool) {
    const int M = ctx.inst->num_edge();
    std::map<int, int> slot_of_id;
    for (std::size_t s = 0; s < ctx.size(); ++s) slot_of_id[ctx.task_id(static_cast<int>(s))] = static_cast<int>(s);
    std::vector<CompiledRow> rows;
    rows.reserve(pool.cuts().size());
    for (const auto& cut : pool.cuts()) {
        CompiledRow r;
        r.rhs = cut.rhs;
        for (const auto& t : cut.terms) {
            auto it = slot_of_id.find(t.task_id);
            if (it == slot_of_id.end() || t.coeff == 0.0) continue;
            r.terms.push_back({it->second, choice_index(t.choice, M), t.coeff});
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

double tie_band(double incumbent, double rel) {
    return std::isfinite(incumbent) ? rel * (1.0 + std::abs(incumbent)) : 0.0;
}

// Sorted distinct values with a relative merge tolerance.
void dedupe(std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    std::vector<double> out;
    for (double a : v)
        if (out.empty() || a - out.back() > 1e-12 * (1.0 + std::abs(a))) out.push_back(a);
    v.swap(out);
}

OffloadDecision full_decision(const MasterContext& ctx, const std::vector<int>& choice_of_slot) {
    const int M = ctx.inst->num_edge();
    OffloadDecision x(ctx.inst->tasks.size(), Choice::local());
    for (std::size_t s = 0; s < ctx.size(); ++s)
        x[static_cast<std::size_t>(ctx.tasks[s])] = choice_at(choice_of_slot[s], M);
    return x;
}

RelaxedBound relax(const MasterContext& ctx, const std::vector<int>& fixed, const std::vector<CompiledRow>& rows,
                   const MasterOptions& opt) {
    const int M = ctx.inst->num_edge();
    const int K = choice_count(M);
    const auto S = ctx.size();
    RelaxedBound rb;
    rb.allowed.assign(S, std::vector<bool>(static_cast<std::size_t>(K), false));
    rb.forced.assign(S, -1);

    std::vector<int> domain(S, 0);
    for (std::size_t s = 0; s < S; ++s) {
        const CostVectors& cv = ctx.profile(static_cast<int>(s));
        for (int c = 0; c < K; ++c) {
            bool ok = cv.choices[static_cast<std::size_t>(c)].admissible();
            if (fixed[s] >= 0) ok = ok && c == fixed[s];
            rb.allowed[s][static_cast<std::size_t>(c)] = ok;
            domain[s] += ok;
        }
        if (domain[s] == 0) return rb;
    }
    auto single = [&](std::size_t s) {
        for (int c = 0; c < K; ++c)
            if (rb.allowed[s][static_cast<std::size_t>(c)]) return c;
        return -1;
    };

    // Propagate cut rows: a free indicator whose coefficient exceeds the
    // residual right-hand side can never be one.
    std::vector<double> residual(rows.size());
    std::vector<bool> live(rows.size(), true);
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (!live[r]) continue;
            double rhs = rows[r].rhs;
            for (const auto& t : rows[r].terms) {
                auto s = static_cast<std::size_t>(t.slot);
                if (domain[s] == 1 && rb.allowed[s][static_cast<std::size_t>(t.choice)]) rhs -= t.coeff;
            }
            if (rhs < -opt.tol) return rb;
            residual[r] = rhs;
            for (const auto& t : rows[r].terms) {
                auto s = static_cast<std::size_t>(t.slot);
                if (domain[s] < 2 || !rb.allowed[s][static_cast<std::size_t>(t.choice)]) continue;
                if (t.coeff > rhs + opt.tol) {
                    rb.allowed[s][static_cast<std::size_t>(t.choice)] = false;
                    if (--domain[s] == 0) return rb;
                    changed = true;
                }
            }
        }
    }
    for (std::size_t s = 0; s < S; ++s)
        if (domain[s] == 1) rb.forced[s] = single(s);

    // Rows that cannot bind over the remaining free indicators are dropped.
    std::vector<std::size_t> kept;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        std::map<int, double> worst;
        for (const auto& t : rows[r].terms) {
            auto s = static_cast<std::size_t>(t.slot);
            if (domain[s] < 2 || !rb.allowed[s][static_cast<std::size_t>(t.choice)]) continue;
            double& w = worst[t.slot];
            w = std::max(w, t.coeff);
        }
        double act = 0.0;
        for (auto& [s, w] : worst) act += w;
        if (act > residual[r] + opt.tol) kept.push_back(r);
    }

    const auto& devices = ctx.inst->devices;
    const double eps = ctx.inst->utility_epsilon;
    std::vector<double> base(devices.size(), 0.0);
    std::vector<std::vector<std::size_t>> free_slots(devices.size());
    for (std::size_t s = 0; s < S; ++s) {
        auto d = static_cast<std::size_t>(ctx.device_of_slot[s]);
        if (rb.forced[s] >= 0)
            base[d] += ctx.profile(static_cast<int>(s)).choices[static_cast<std::size_t>(rb.forced[s])].delta;
        else
            free_slots[d].push_back(s);
    }

    // Every slot determined: the node is a leaf.
    bool all_forced = std::all_of(rb.forced.begin(), rb.forced.end(), [](int c) { return c >= 0; });
    if (all_forced) {
        rb.integral = full_decision(ctx, rb.forced);
        rb.integral_value = master_value(ctx, *rb.integral, opt.objective);
        rb.bound = rb.integral_value;
        rb.state = CacheState::Value;
        return rb;
    }

    // Variables for free slots.
    PolytopeLogProgram p;
    std::vector<std::vector<int>> var(S, std::vector<int>(static_cast<std::size_t>(K), -1));
    std::vector<std::pair<std::size_t, int>> var_info;
    for (std::size_t s = 0; s < S; ++s) {
        if (rb.forced[s] >= 0) continue;
        LinearRow eq;
        eq.rhs = 1.0;
        for (int c = 0; c < K; ++c) {
            if (!rb.allowed[s][static_cast<std::size_t>(c)]) continue;
            var[s][static_cast<std::size_t>(c)] = static_cast<int>(var_info.size());
            eq.coeffs.push_back({static_cast<int>(var_info.size()), 1.0});
            var_info.push_back({s, c});
        }
        p.equalities.push_back(std::move(eq));
    }
    const int nx = static_cast<int>(var_info.size());
    std::vector<double> start(static_cast<std::size_t>(nx));
    for (int v = 0; v < nx; ++v) {
        auto s = var_info[static_cast<std::size_t>(v)].first;
        start[static_cast<std::size_t>(v)] = 1.0 / static_cast<double>(domain[s]);
    }
    for (std::size_t r : kept) {
        LinearRow row;
        row.rhs = residual[r];
        for (const auto& t : rows[r].terms) {
            int v = var[static_cast<std::size_t>(t.slot)][static_cast<std::size_t>(t.choice)];
            if (v >= 0 && rb.forced[static_cast<std::size_t>(t.slot)] < 0) row.coeffs.push_back({v, t.coeff});
        }
        if (!row.coeffs.empty()) p.inequalities.push_back(std::move(row));
    }
    auto delta_of = [&](int v) {
        auto [s, c] = var_info[static_cast<std::size_t>(v)];
        return ctx.profile(static_cast<int>(s)).choices[static_cast<std::size_t>(c)].delta;
    };

    double constant = 0.0;
    std::vector<double> linear(static_cast<std::size_t>(nx), 0.0);
    std::vector<double> lower(static_cast<std::size_t>(nx), 0.0), upper(static_cast<std::size_t>(nx), 1.0);
    if (opt.objective == MasterObjective::Welfare) {
        for (double b : base) constant += b;
        for (int v = 0; v < nx; ++v) linear[static_cast<std::size_t>(v)] = delta_of(v);
    } else {
        for (std::size_t d = 0; d < devices.size(); ++d) {
            const double rho = devices[d].weight;
            if (rho == 0.0) continue;
            if (free_slots[d].empty()) {
                constant += log_utility(rho, base[d], eps);
                continue;
            }
            SparseRow coeffs;
            double u0 = base[d];
            for (std::size_t s : free_slots[d])
                for (int c = 0; c < K; ++c) {
                    int v = var[s][static_cast<std::size_t>(c)];
                    if (v < 0) continue;
                    coeffs.push_back({v, delta_of(v)});
                    u0 += delta_of(v) * start[static_cast<std::size_t>(v)];
                }
            std::vector<double> values;
            bool envelope = opt.relaxation == Relaxation::Envelope;
            if (envelope) {
                values.push_back(base[d]);
                for (std::size_t s : free_slots[d]) {
                    std::vector<double> next;
                    for (int c = 0; c < K && envelope; ++c) {
                        if (!rb.allowed[s][static_cast<std::size_t>(c)]) continue;
                        double dl = ctx.profile(static_cast<int>(s)).choices[static_cast<std::size_t>(c)].delta;
                        for (double a : values) next.push_back(a + dl);
                    }
                    dedupe(next);
                    values.swap(next);
                    if (static_cast<int>(values.size()) > opt.envelope_limit) {
                        envelope = false;
                        break;
                    }
                }
                if (envelope && !(values.front() + eps > 0.0)) envelope = false;
            }
            if (!envelope) {
                p.terms.push_back({rho, coeffs, base[d], eps});
                continue;
            }
            if (values.size() == 1) {
                constant += log_utility(rho, values.front(), eps);
                continue;
            }
            // Epigraph variable under every chord of the interpolation.
            int tv = static_cast<int>(linear.size());
            linear.push_back(1.0);
            double f_lo = log_utility(rho, values.front(), eps);
            double f_hi = log_utility(rho, values.back(), eps);
            lower.push_back(f_lo - 1.0);
            upper.push_back(f_hi + 1.0);
            double t0 = kInf;
            for (std::size_t k = 0; k + 1 < values.size(); ++k) {
                double a0 = values[k], a1 = values[k + 1];
                double f0 = log_utility(rho, a0, eps), f1 = log_utility(rho, a1, eps);
                double slope = (f1 - f0) / (a1 - a0);
                // t - slope * sum(delta x) <= f0 + slope * (base - a0)
                LinearRow row;
                row.coeffs.push_back({tv, 1.0});
                for (auto [v, dl] : coeffs) row.coeffs.push_back({v, -slope * dl});
                row.rhs = f0 + slope * (base[d] - a0);
                p.inequalities.push_back(std::move(row));
                t0 = std::min(t0, f0 + slope * (u0 - a0));
            }
            start.push_back(std::max(t0 - 0.5, f_lo - 0.5));
        }
    }

    p.num_vars = static_cast<int>(linear.size());
    p.linear = std::move(linear);
    p.lower = std::move(lower);
    p.upper = std::move(upper);
    p.start = std::move(start);

    IpmOptions io;
    io.tol = opt.solver_tol;
    LogPolytopeResult res = maximize_log_polytope(p, io);
    rb.solver_status = res.status;
    rb.kkt_residual = res.kkt_residual;
    if (res.status == SolveStatus::Infeasible) return rb;
    rb.state = CacheState::Value;
    rb.bound = res.bound + constant;

    // Integral point check on the indicator variables.
    std::vector<int> choice(rb.forced);
    bool integral = true;
    for (std::size_t s = 0; s < S && integral; ++s) {
        if (choice[s] >= 0) continue;
        int picked = -1;
        for (int c = 0; c < K; ++c) {
            int v = var[s][static_cast<std::size_t>(c)];
            if (v < 0) continue;
            double xv = res.x[static_cast<std::size_t>(v)];
            if (xv > 1.0 - 1e-6) {
                if (picked >= 0) integral = false;
                picked = c;
            } else if (xv > 1e-6) {
                integral = false;
            }
        }
        if (picked < 0) integral = false;
        choice[s] = picked;
    }
    if (integral) {
        for (const auto& row : rows) {
            double l = 0.0;
            for (const auto& t : row.terms)
                if (choice[static_cast<std::size_t>(t.slot)] == t.choice) l += t.coeff;
            if (l > row.rhs + opt.tol) {
                integral = false;
                break;
            }
        }
    }
    if (integral) {
        rb.integral = full_decision(ctx, choice);
        rb.integral_value = master_value(ctx, *rb.integral, opt.objective);
        rb.bound = std::max(rb.bound, rb.integral_value);
    }
    return rb;
}

void trace_line(const MasterOptions& opt, int depth, const char* action, double bound, double incumbent) {
    if (!opt.trace) return;
    char buf[160];
    std::snprintf(buf, sizeof buf, "depth=%d action=%s bound=%.12g incumbent=%.12g", depth, action, bound, incumbent);
    *opt.trace << buf << '\n';
}

std::vector<Choice> policy_order(const MasterContext& ctx, const NodeLoadState& state, int slot,
                                 const std::vector<bool>& allowed, BranchPolicy policy) {
    const int M = ctx.inst->num_edge();
    if (policy == BranchPolicy::Balanced) return order_processors(ctx, state, slot, allowed);
    std::vector<Choice> order;
    if (policy == BranchPolicy::Lexicographic) {
        // Smallest indicator vector first: later positions of the vector are set before earlier ones.
        for (int j = M + 1; j >= 1; --j) order.push_back(Choice::via(j));
        for (int j = M + 1; j >= 1; --j) order.push_back(Choice::edge(j));
    } else {
        for (int j = 1; j <= M + 1; ++j) order.push_back(Choice::edge(j));
        for (int j = 1; j <= M; ++j) order.push_back(Choice::via(j));
    }
    order.push_back(Choice::local());
    std::vector<Choice> out;
    for (Choice c : order)
        if (allowed[static_cast<std::size_t>(choice_index(c, M))]) out.push_back(c);
    return out;
}

}  // namespace

MasterContext MasterContext::build(const Instance& inst) {
    MasterContext ctx;
    ctx.inst = &inst;
    ctx.profiles = all_profiles(inst);
    ctx.slot_of_task.assign(inst.tasks.size(), -1);
    for (std::size_t i = 0; i < inst.tasks.size(); ++i) {
        if (!is_solver_task(ctx.profiles[i].category)) continue;
        ctx.slot_of_task[i] = static_cast<int>(ctx.tasks.size());
        ctx.tasks.push_back(static_cast<int>(i));
        ctx.device_of_slot.push_back(inst.device_index(inst.tasks[i].ue_id));
    }
    return ctx;
}

double master_value(const MasterContext& ctx, const OffloadDecision& x, MasterObjective obj) {
    UtilityVector u = utilities(*ctx.inst, x, ctx.profiles);
    return obj == MasterObjective::Welfare ? total_benefit(u) : u.objective;
}

NodeLoadState load_state(const MasterContext& ctx, const std::vector<int>& fixed) {
    const int M = ctx.inst->num_edge();
    NodeLoadState st;
    auto nodes = static_cast<std::size_t>(M + 1);
    st.up.assign(nodes, 0.0);
    st.down.assign(nodes, 0.0);
    st.compute.assign(nodes, 0.0);
    st.via.assign(nodes, 0.0);
    st.utility.assign(ctx.inst->devices.size(), 0.0);
    st.chosen.assign(ctx.inst->devices.size(), {});
    for (std::size_t s = 0; s < ctx.size(); ++s) {
        if (fixed[s] < 0) continue;
        const ChoiceCost& cc = ctx.profile(static_cast<int>(s)).choices[static_cast<std::size_t>(fixed[s])];
        auto d = static_cast<std::size_t>(ctx.device_of_slot[s]);
        st.utility[d] += cc.delta;
        st.chosen[d].push_back(static_cast<int>(s));
        if (cc.choice.is_local() || !cc.size) continue;
        auto j = static_cast<std::size_t>(cc.choice.node - 1);
        st.up[j] += cc.size->up;
        st.down[j] += cc.size->down;
        st.compute[j] += cc.size->compute();
        st.via[j] += cc.size->via;
    }
    return st;
}

int select_task(const MasterContext& ctx, const NodeLoadState& state, const std::vector<int>& candidates) {
    // Offload-only tasks go first.
    std::vector<int> pool;
    for (int s : candidates)
        if (ctx.profile(s).category == Category::Cat4) pool.push_back(s);
    if (pool.empty()) pool = candidates;

    auto rel_less = [](double a, double b) { return a < b - 1e-12 * std::max(std::abs(a), std::abs(b)); };
    std::map<int, int> best_of_device;
    for (int s : pool) {
        int d = ctx.device_of_slot[static_cast<std::size_t>(s)];
        auto it = best_of_device.find(d);
        if (it == best_of_device.end()) {
            best_of_device[d] = s;
            continue;
        }
        int cur = it->second;
        double rs = ctx.profile(s).rate, rc = ctx.profile(cur).rate;
        if (rel_less(rc, rs) || (!rel_less(rs, rc) && ctx.task_id(s) < ctx.task_id(cur))) it->second = s;
    }
    const double eps = std::max(ctx.inst->utility_epsilon, std::numeric_limits<double>::min());
    int best = -1;
    double best_score = -kInf;
    for (auto [d, s] : best_of_device) {
        double rho = ctx.inst->devices[static_cast<std::size_t>(d)].weight;
        double up = std::max(0.0, state.utility[static_cast<std::size_t>(d)]);
        double score = rho * std::log1p(ctx.profile(s).delta_max / (up + eps));
        if (best < 0 || rel_less(best_score, score) || (!rel_less(score, best_score) && ctx.task_id(s) < ctx.task_id(best))) {
            best = s;
            best_score = score;
        }
    }
    return best;
}

std::vector<Choice> order_processors(const MasterContext& ctx, const NodeLoadState& state, int slot,
                                     const std::vector<bool>& allowed) {
    const int M = ctx.inst->num_edge();
    const CostVectors& cv = ctx.profile(slot);
    auto ratio = [](double num, double cap) {
        if (num == 0.0) return 0.0;
        return cap > 0.0 ? num / cap : kInf;
    };
    std::vector<std::pair<double, Choice>> edges, vias;
    for (int j = 1; j <= M + 1; ++j) {
        const EdgeNode& node = ctx.inst->node(j);
        auto k = static_cast<std::size_t>(j - 1);
        Choice e = Choice::edge(j);
        if (allowed[static_cast<std::size_t>(choice_index(e, M))]) {
            const RelativeSize& s = *cv.at(e, M).size;
            double beta = ratio(state.up[k] + s.up, node.uplink) + ratio(state.down[k] + s.down, node.downlink) +
                          ratio(state.compute[k] + s.compute(), node.compute);
            edges.push_back({beta, e});
        }
        Choice v = Choice::via(j);
        if (allowed[static_cast<std::size_t>(choice_index(v, M))]) {
            const RelativeSize& s = *cv.at(v, M).size;
            double beta = ratio(state.up[k] + s.up, node.uplink) + ratio(state.down[k] + s.down, node.downlink) +
                          ratio(state.via[k] + s.via, node.backhaul);
            vias.push_back({beta, v});
        }
    }
    auto by_beta = [](const std::pair<double, Choice>& a, const std::pair<double, Choice>& b) {
        double band = 1e-12 * std::max(std::abs(a.first), std::abs(b.first));
        if (std::abs(a.first - b.first) > band) return a.first < b.first;
        return a.second.node < b.second.node;
    };
    std::stable_sort(edges.begin(), edges.end(), by_beta);
    std::stable_sort(vias.begin(), vias.end(), by_beta);
    std::vector<Choice> out;
    for (auto& e : edges) out.push_back(e.second);
    for (auto& v : vias) out.push_back(v.second);
    if (allowed[0]) out.push_back(Choice::local());
    return out;
}

RelaxedBound relaxed_bound(const MasterContext& ctx, const std::vector<int>& fixed, const CutPool& pool,
                           const MasterOptions& opt) {
    return relax(ctx, fixed, compile(ctx, pool), opt);
}

DbbResult dbb_solve(const MasterContext& ctx, const CutPool& pool, std::unique_ptr<TreeNode>& tree,
                    const MasterOptions& opt) {
    const int M = ctx.inst->num_edge();
    const auto rows = compile(ctx, pool);
    if (!tree) {
        tree = std::make_unique<TreeNode>();
        tree->fixed.assign(ctx.size(), -1);
    }
    DbbResult out;
    double incumbent = -kInf;
    std::vector<TreeNode*> stack{tree.get()};
    while (!stack.empty()) {
        TreeNode* p = stack.back();
        stack.pop_back();
        ++out.stats.nodes_visited;
        const double band = tie_band(incumbent, opt.prune_tol);

        // Case 1: a cached bound already at or below the incumbent. A child
        // never solved inherits its parent's bound.
        if (p->cache == CacheState::Value && p->bound <= incumbent + band) {
            trace_line(opt, p->depth, "case1-prune", p->bound, incumbent);
            continue;
        }
        if (p->cache == CacheState::None && p->parent && p->parent->cache == CacheState::Value &&
            p->parent->bound <= incumbent + band) {
            trace_line(opt, p->depth, "case1-prune", p->parent->bound, incumbent);
            continue;
        }
        if (p->cache == CacheState::Infeasible) {
            trace_line(opt, p->depth, "infeasible-prune", -kInf, incumbent);
            continue;
        }

        // Case 2: solve the relaxation under the current cut pool.
        RelaxedBound rb = relax(ctx, p->fixed, rows, opt);
        ++out.stats.relaxations;
        out.stats.max_kkt = std::max(out.stats.max_kkt, rb.kkt_residual);
        p->cut_version = pool.version();
        if (rb.state == CacheState::Infeasible) {
            trace_line(opt, p->depth, "infeasible-prune", -kInf, incumbent);
            if (p->parent) {
                auto& sib = p->parent->children;
                sib.erase(std::remove_if(sib.begin(), sib.end(), [p](const auto& c) { return c.get() == p; }), sib.end());
            } else {
                p->cache = CacheState::Infeasible;
                p->children.clear();
                p->branched = false;
            }
            continue;
        }
        p->cache = CacheState::Value;
        p->bound = rb.bound;
        if (rb.bound <= incumbent + band) {
            trace_line(opt, p->depth, "bound-prune", rb.bound, incumbent);
            continue;
        }
        if (rb.integral) {
            if (rb.integral_value > incumbent + band) {
                incumbent = rb.integral_value;
                out.x = rb.integral;
                out.value = incumbent;
            }
            trace_line(opt, p->depth, "incumbent", rb.bound, incumbent);
            continue;
        }
        if (!p->branched) {
            std::vector<int> candidates;
            for (std::size_t s = 0; s < ctx.size(); ++s)
                if (p->fixed[s] < 0 && rb.forced[s] < 0) candidates.push_back(static_cast<int>(s));
            if (candidates.empty()) continue;
            NodeLoadState st = load_state(ctx, p->fixed);
            int slot = opt.policy == BranchPolicy::Balanced ? select_task(ctx, st, candidates) : candidates.front();
            if (opt.policy != BranchPolicy::Balanced) {
                // Id order.
                for (int s : candidates)
                    if (ctx.task_id(s) < ctx.task_id(slot)) slot = s;
            }
            p->branch_slot = slot;
            for (Choice c : policy_order(ctx, st, slot, rb.allowed[static_cast<std::size_t>(slot)], opt.policy)) {
                auto child = std::make_unique<TreeNode>();
                child->fixed = p->fixed;
                child->fixed[static_cast<std::size_t>(slot)] = choice_index(c, M);
                child->parent = p;
                child->depth = p->depth + 1;
                p->children.push_back(std::move(child));
            }
            p->branched = true;
        }
        trace_line(opt, p->depth, "branch", rb.bound, incumbent);
        for (auto it = p->children.rbegin(); it != p->children.rend(); ++it) stack.push_back(it->get());
    }
    return out;
}

}  // namespace fairoffload
