// SPDX-License-Identifier: Apache-2.0

#include "fairoffload/convexcore.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <sstream>

namespace fairoffload {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double inf_norm(const VectorXd& v) { return v.size() ? v.lpNorm<Eigen::Infinity>() : 0.0; }

// F(x) = sum rho_k ln(C_k x + d_k) + q.x + constant, all over the free variables.
struct LogObjective {
    MatrixXd C;
    VectorXd d;
    VectorXd rho;
    VectorXd q;
    double constant = 0.0;

    VectorXd args(const VectorXd& x) const { return C.rows() ? VectorXd(C * x + d) : VectorXd(); }

    double value(const VectorXd& x) const {
        double v = constant + q.dot(x);
        VectorXd a = args(x);
        for (Eigen::Index k = 0; k < a.size(); ++k) {
            if (rho(k) == 0.0) continue;
            if (!(a(k) > 0.0)) return -kInf;
            v += rho(k) * std::log(a(k));
        }
        return v;
    }

    VectorXd gradient(const VectorXd& x) const {
        VectorXd g = q;
        if (C.rows()) {
            VectorXd a = args(x);
            g.noalias() += C.transpose() * rho.cwiseQuotient(a);
        }
        return g;
    }

    // Negative semidefinite; returned with its sign flipped.
    MatrixXd neg_hessian(const VectorXd& x) const {
        const Eigen::Index n = q.size();
        MatrixXd H = MatrixXd::Zero(n, n);
        if (C.rows()) {
            VectorXd a = args(x);
            VectorXd wgt = rho.cwiseQuotient(a.cwiseProduct(a));
            H.noalias() += C.transpose() * wgt.asDiagonal() * C;
        }
        return H;
    }
};

struct IpmProblem {
    const LogObjective* F = nullptr;
    MatrixXd A;
    VectorXd b;
    MatrixXd G;
    VectorXd h;
    VectorXd l;
    VectorXd u;
};

struct IpmOutcome {
    bool converged = false;
    bool stopped_early = false;
    VectorXd x, y, w, s, zl, zu;
    double kkt = kInf;
    int iterations = 0;
};

struct Residuals {
    VectorXd rd, re, rp;
    double comp = 0.0;
    double kkt = 0.0;
    double mu = 0.0;
};

Residuals residuals(const IpmProblem& P, const IpmOutcome& st, const VectorXd& gradf) {
    Residuals r;
    r.rd = gradf - st.zl + st.zu;
    if (P.A.rows()) r.rd.noalias() += P.A.transpose() * st.y;
    if (P.G.rows()) r.rd.noalias() += P.G.transpose() * st.w;
    r.re = P.A.rows() ? VectorXd(P.A * st.x - P.b) : VectorXd();
    r.rp = P.G.rows() ? VectorXd(P.G * st.x + st.s - P.h) : VectorXd();
    VectorXd xl = st.x - P.l, xu = P.u - st.x;
    r.comp = st.s.dot(st.w) + xl.dot(st.zl) + xu.dot(st.zu);
    double m = static_cast<double>(st.s.size() + 2 * st.x.size());
    r.mu = m > 0 ? r.comp / m : 0.0;
    double fval = std::abs(P.F->value(st.x));
    if (!std::isfinite(fval)) fval = 0.0;
    r.kkt = std::max({inf_norm(r.rd) / (1.0 + inf_norm(gradf)), inf_norm(r.re) / (1.0 + inf_norm(P.b)),
                      inf_norm(r.rp) / (1.0 + inf_norm(P.h)), r.comp / (1.0 + fval)});
    return r;
}

double max_step(const VectorXd& v, const VectorXd& dv) {
    double a = kInf;
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (dv(i) < 0.0) a = std::min(a, -v(i) / dv(i));
    return a;
}

// Primal-dual path following with Mehrotra correction. Minimizes -F.
IpmOutcome run_ipm(const IpmProblem& P, const VectorXd& x0, double tol, int max_iter,
                   const std::function<bool(const IpmOutcome&, const Residuals&)>& early_stop = {}) {
    const Eigen::Index n = x0.size();
    const Eigen::Index me = P.A.rows();
    const Eigen::Index mi = P.G.rows();
    IpmOutcome st;
    st.x = x0;
    VectorXd gradf = -P.F->gradient(st.x);
    double mu0 = std::max(1e-2, 0.1 * (1.0 + inf_norm(gradf)));
    st.y = VectorXd::Zero(me);
    st.s = mi ? VectorXd(P.h - P.G * st.x) : VectorXd();
    for (Eigen::Index i = 0; i < mi; ++i) st.s(i) = std::max(st.s(i), 1e-3 * (1.0 + std::abs(P.h(i))));
    st.w = mu0 * st.s.cwiseInverse();
    st.zl = mu0 * (st.x - P.l).cwiseInverse();
    st.zu = mu0 * (P.u - st.x).cwiseInverse();

    const Eigen::SparseMatrix<double> Gs = P.G.sparseView();
    const Eigen::SparseMatrix<double> Gst = Gs.transpose();

    int stalls = 0;
    // Near the floating point floor the Newton systems degrade; keep the
    // best iterate and stop once it has not improved for a while.
    IpmOutcome best;
    int since_best = 0;
    auto give_up = [&](int it) {
        IpmOutcome out = best.x.size() ? best : st;
        out.iterations = it;
        return out;
    };
    for (int it = 0; it < max_iter; ++it) {
        st.iterations = it;
        gradf = -P.F->gradient(st.x);
        Residuals R = residuals(P, st, gradf);
        st.kkt = R.kkt;
        if (early_stop && early_stop(st, R)) {
            st.stopped_early = true;
            return st;
        }
        if (R.kkt <= tol) {
            st.converged = true;
            return st;
        }
        if (std::isnan(R.kkt)) return give_up(it);
        if (R.kkt < best.kkt) {
            best = st;
            since_best = 0;
        } else if (++since_best > 15) {
            return give_up(it);
        }

        VectorXd xl = st.x - P.l, xu = P.u - st.x;
        MatrixXd M = P.F->neg_hessian(st.x);
        M.diagonal() += st.zl.cwiseQuotient(xl) + st.zu.cwiseQuotient(xu);
        VectorXd ws = mi ? VectorXd(st.w.cwiseQuotient(st.s)) : VectorXd();
        if (mi) {
            Eigen::SparseMatrix<double> GtWG = Gst * ws.asDiagonal() * Gs;
            M += MatrixXd(GtWG);
        }

        Eigen::LLT<MatrixXd> llt;
        double reg = 0.0;
        const double scale = std::max(1.0, M.diagonal().cwiseAbs().maxCoeff());
        for (int attempt = 0; attempt < 8; ++attempt) {
            MatrixXd Mr = M;
            if (reg > 0.0) Mr.diagonal().array() += reg;
            llt.compute(Mr);
            if (llt.info() == Eigen::Success) break;
            reg = reg == 0.0 ? 1e-12 * scale : reg * 100.0;
        }
        if (llt.info() != Eigen::Success) return give_up(it);

        MatrixXd MinvAt;
        Eigen::LDLT<MatrixXd> schur;
        if (me) {
            MinvAt = llt.solve(P.A.transpose());
            MatrixXd S = P.A * MinvAt;
            S.diagonal().array() += 1e-14 * std::max(1.0, S.diagonal().cwiseAbs().maxCoeff());
            schur.compute(S);
        }

        struct Dir {
            VectorXd dx, dy, dw, ds, dzl, dzu;
        };
        auto solve_dir = [&](const VectorXd& rsw, const VectorXd& rzl, const VectorXd& rzu) {
            Dir d;
            VectorXd rhs = -R.rd + rzl.cwiseQuotient(xl) - rzu.cwiseQuotient(xu);
            if (mi) rhs -= Gst * VectorXd((rsw + st.w.cwiseProduct(R.rp)).cwiseQuotient(st.s));
            // [M A'; A 0] [dx; dy] = [rhs; -re], refined against the unregularized M.
            auto reduced = [&](const VectorXd& r1, const VectorXd& r2, VectorXd& dx, VectorXd& dy) {
                VectorXd Minv_r1 = llt.solve(r1);
                if (me) {
                    dy = schur.solve(P.A * Minv_r1 - r2);
                    dx = Minv_r1 - MinvAt * dy;
                } else {
                    dy = VectorXd();
                    dx = Minv_r1;
                }
            };
            const VectorXd r2 = me ? VectorXd(-R.re) : VectorXd();
            reduced(rhs, r2, d.dx, d.dy);
            for (int refine = 0; refine < 2; ++refine) {
                VectorXd e1 = rhs - M * d.dx;
                if (me) e1.noalias() -= P.A.transpose() * d.dy;
                VectorXd e2 = me ? VectorXd(r2 - P.A * d.dx) : VectorXd();
                double err = std::max(inf_norm(e1), inf_norm(e2));
                if (!(err > 1e-14 * (1.0 + inf_norm(rhs)))) break;
                VectorXd cx, cy;
                reduced(e1, e2, cx, cy);
                d.dx += cx;
                if (me) d.dy += cy;
            }
            d.dzl = (rzl - st.zl.cwiseProduct(d.dx)).cwiseQuotient(xl);
            d.dzu = (rzu + st.zu.cwiseProduct(d.dx)).cwiseQuotient(xu);
            if (mi) {
                d.ds = -R.rp - Gs * d.dx;
                d.dw = (rsw - st.w.cwiseProduct(d.ds)).cwiseQuotient(st.s);
            } else {
                d.ds = VectorXd();
                d.dw = VectorXd();
            }
            return d;
        };
        auto step_len = [&](const Dir& d) {
            double a = 1.0;
            a = std::min(a, max_step(xl, d.dx));
            a = std::min(a, max_step(xu, -d.dx));
            a = std::min(a, max_step(st.s, d.ds));
            a = std::min(a, max_step(st.w, d.dw));
            a = std::min(a, max_step(st.zl, d.dzl));
            a = std::min(a, max_step(st.zu, d.dzu));
            if (P.F->C.rows()) a = std::min(a, max_step(P.F->args(st.x), P.F->C * d.dx));
            return a;
        };

        // Predictor.
        VectorXd rsw = -st.s.cwiseProduct(st.w);
        VectorXd rzl = -xl.cwiseProduct(st.zl);
        VectorXd rzu = -xu.cwiseProduct(st.zu);
        Dir aff = solve_dir(rsw, rzl, rzu);
        double a_aff = std::min(1.0, step_len(aff));
        double comp_aff = (st.s + a_aff * aff.ds).dot(st.w + a_aff * aff.dw) +
                          (xl + a_aff * aff.dx).dot(st.zl + a_aff * aff.dzl) +
                          (xu - a_aff * aff.dx).dot(st.zu + a_aff * aff.dzu);
        double sigma = R.comp > 0.0 ? std::pow(std::max(0.0, comp_aff) / R.comp, 3.0) : 0.0;
        sigma = std::clamp(sigma, 0.0, 1.0);
        double smu = sigma * R.mu;

        // Corrector.
        rsw = (smu - st.s.cwiseProduct(st.w).array()).matrix() - aff.ds.cwiseProduct(aff.dw);
        rzl = (smu - xl.cwiseProduct(st.zl).array()).matrix() - aff.dx.cwiseProduct(aff.dzl);
        rzu = (smu - xu.cwiseProduct(st.zu).array()).matrix() + aff.dx.cwiseProduct(aff.dzu);
        Dir d = solve_dir(rsw, rzl, rzu);
        double a = step_len(d);
        double tau = std::max(0.99, 1.0 - R.mu);
        a = std::min(1.0, tau * a);
        if (!(a > 1e-14)) {
            if (++stalls > 20) return give_up(it);
            a = 1e-14;
        } else {
            stalls = 0;
        }

        st.x += a * d.dx;
        st.x = st.x.cwiseMax(P.l).cwiseMin(P.u);
        if (me) st.y += a * d.dy;
        if (mi) {
            st.s += a * d.ds;
            st.w += a * d.dw;
        }
        st.zl += a * d.dzl;
        st.zu += a * d.dzu;
        // Interior safety after clamping.
        for (Eigen::Index i = 0; i < n; ++i) {
            double width = P.u(i) - P.l(i);
            double m = 1e-15 * width;
            st.x(i) = std::clamp(st.x(i), P.l(i) + m, P.u(i) - m);
        }
    }
    return give_up(max_iter);
}

// Lagrangian upper bound on max F valid for any multipliers with w >= 0.
double certified_bound(const IpmProblem& P, const IpmOutcome& st) {
    double Fx = P.F->value(st.x);
    if (!std::isfinite(Fx)) return kInf;
    VectorXd g = P.F->gradient(st.x);
    double ub = Fx;
    VectorXd w = st.w.cwiseMax(0.0);
    if (P.A.rows()) {
        g.noalias() -= P.A.transpose() * st.y;
        ub -= st.y.dot(P.A * st.x - P.b);
    }
    if (P.G.rows()) {
        g.noalias() -= P.G.transpose() * w;
        ub -= w.dot(P.G * st.x - P.h);
    }
    for (Eigen::Index j = 0; j < g.size(); ++j)
        ub += std::max(g(j) * (P.l(j) - st.x(j)), g(j) * (P.u(j) - st.x(j)));
    return ub;
}

}  // namespace

const char* to_string(SolveStatus s) {
    switch (s) {
    case SolveStatus::Feasible: return "feasible";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::IterationLimit: return "iteration-limit";
    }
    return "?";
}

double PolytopeLogProgram::objective(const std::vector<double>& x) const {
    double v = 0.0;
    for (const auto& t : terms) {
        if (t.weight == 0.0) continue;
        double a = t.offset + t.eps;
        for (auto [j, c] : t.coeffs) a += c * x[static_cast<std::size_t>(j)];
        if (!(a > 0.0)) return -kInf;
        v += t.weight * std::log(a);
    }
    for (std::size_t j = 0; j < linear.size(); ++j) v += linear[j] * x[j];
    return v;
}

LogPolytopeResult maximize_log_polytope(const PolytopeLogProgram& p, const IpmOptions& opt) {
    const int n_all = p.num_vars;
    LogPolytopeResult res;
    std::vector<double> lo(p.lower), hi(p.upper);
    lo.resize(static_cast<std::size_t>(n_all), 0.0);
    hi.resize(static_cast<std::size_t>(n_all), 1.0);

    std::vector<int> free_of(static_cast<std::size_t>(n_all), -1);
    std::vector<int> free_vars;
    std::vector<double> fixed_x(static_cast<std::size_t>(n_all), 0.0);
    for (int j = 0; j < n_all; ++j) {
        auto sj = static_cast<std::size_t>(j);
        if (lo[sj] > hi[sj]) return res;
        if (lo[sj] == hi[sj]) {
            fixed_x[sj] = lo[sj];
        } else {
            free_of[sj] = static_cast<int>(free_vars.size());
            free_vars.push_back(j);
        }
    }
    const auto n = static_cast<Eigen::Index>(free_vars.size());

    auto reduce_rows = [&](const std::vector<LinearRow>& rows, MatrixXd& M, VectorXd& rhs, bool equality) {
        std::vector<std::pair<SparseRow, double>> kept;
        for (const auto& row : rows) {
            SparseRow r;
            double b = row.rhs;
            for (auto [j, c] : row.coeffs) {
                auto sj = static_cast<std::size_t>(j);
                if (free_of[sj] < 0)
                    b -= c * fixed_x[sj];
                else if (c != 0.0)
                    r.push_back({free_of[sj], c});
            }
            double slack = opt.tol * (1.0 + std::abs(row.rhs));
            if (r.empty()) {
                if (equality ? std::abs(b) > slack : b < -slack) return false;
                continue;
            }
            kept.push_back({std::move(r), b});
        }
        M = MatrixXd::Zero(static_cast<Eigen::Index>(kept.size()), n);
        rhs = VectorXd::Zero(static_cast<Eigen::Index>(kept.size()));
        for (std::size_t i = 0; i < kept.size(); ++i) {
            for (auto [j, c] : kept[i].first) M(static_cast<Eigen::Index>(i), j) += c;
            rhs(static_cast<Eigen::Index>(i)) = kept[i].second;
        }
        return true;
    };

    IpmProblem P;
    if (!reduce_rows(p.equalities, P.A, P.b, true) || !reduce_rows(p.inequalities, P.G, P.h, false)) {
        res.status = SolveStatus::Infeasible;
        return res;
    }
    P.l.resize(n);
    P.u.resize(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        P.l(k) = lo[static_cast<std::size_t>(free_vars[static_cast<std::size_t>(k)])];
        P.u(k) = hi[static_cast<std::size_t>(free_vars[static_cast<std::size_t>(k)])];
    }

    LogObjective F;
    F.q = VectorXd::Zero(n);
    for (std::size_t j = 0; j < p.linear.size(); ++j) {
        if (free_of[j] < 0)
            F.constant += p.linear[j] * fixed_x[j];
        else
            F.q(free_of[j]) += p.linear[j];
    }
    std::vector<int> active_terms;
    std::vector<double> offsets;
    for (std::size_t k = 0; k < p.terms.size(); ++k) {
        const LogTerm& t = p.terms[k];
        double off = t.offset + t.eps;
        bool has_free = false;
        for (auto [j, c] : t.coeffs) {
            auto sj = static_cast<std::size_t>(j);
            if (free_of[sj] < 0)
                off += c * fixed_x[sj];
            else if (c != 0.0)
                has_free = true;
        }
        if (t.weight == 0.0) continue;
        if (!has_free) {
            F.constant += off > 0.0 ? t.weight * std::log(off) : -kInf;
            continue;
        }
        active_terms.push_back(static_cast<int>(k));
        offsets.push_back(off);
    }
    const auto nt = static_cast<Eigen::Index>(active_terms.size());
    F.C = MatrixXd::Zero(nt, n);
    F.d = VectorXd::Zero(nt);
    F.rho = VectorXd::Zero(nt);
    for (Eigen::Index k = 0; k < nt; ++k) {
        const LogTerm& t = p.terms[static_cast<std::size_t>(active_terms[static_cast<std::size_t>(k)])];
        for (auto [j, c] : t.coeffs)
            if (free_of[static_cast<std::size_t>(j)] >= 0) F.C(k, free_of[static_cast<std::size_t>(j)]) += c;
        F.d(k) = offsets[static_cast<std::size_t>(k)];
        F.rho(k) = t.weight;
    }
    P.F = &F;

    auto expand = [&](const VectorXd& xf) {
        std::vector<double> x(fixed_x);
        for (Eigen::Index k = 0; k < n; ++k) x[static_cast<std::size_t>(free_vars[static_cast<std::size_t>(k)])] = xf(k);
        return x;
    };

    if (n == 0) {
        res.status = SolveStatus::Feasible;
        res.x = fixed_x;
        res.value = p.objective(res.x);
        res.bound = res.value;
        return res;
    }

    // Starting point: the hint if strictly inside, otherwise the box centre
    // moved onto the equalities by a least-norm correction.
    VectorXd x0(n);
    bool hint = p.start.size() == static_cast<std::size_t>(n_all);
    for (Eigen::Index k = 0; k < n && hint; ++k) {
        double v = p.start[static_cast<std::size_t>(free_vars[static_cast<std::size_t>(k)])];
        if (!(v > P.l(k) && v < P.u(k))) hint = false;
        x0(k) = v;
    }
    if (!hint) {
        x0 = 0.5 * (P.l + P.u);
        if (P.A.rows()) {
            MatrixXd AAt = P.A * P.A.transpose();
            VectorXd corr = P.A.transpose() * AAt.ldlt().solve(P.b - P.A * x0);
            x0 += corr;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
            double width = P.u(k) - P.l(k);
            x0(k) = std::clamp(x0(k), P.l(k) + 1e-2 * width, P.u(k) - 1e-2 * width);
        }
    }
    {
        VectorXd a = F.args(x0);
        for (Eigen::Index k = 0; k < a.size(); ++k)
            if (!(a(k) > 0.0)) {
                // Domain of the log not reached from this start; fall back to the box centre.
                x0 = 0.5 * (P.l + P.u);
                break;
            }
    }

    int total_iter = 0;
    // Phase 1 when the start violates an inequality.
    double worst = P.G.rows() ? (P.G * x0 - P.h).maxCoeff() : -kInf;
    if (worst > 0.0) {
        LogObjective F1;
        F1.q = VectorXd::Zero(n + 1);
        F1.q(n) = -1.0;
        IpmProblem P1;
        P1.F = &F1;
        P1.A = MatrixXd::Zero(P.A.rows(), n + 1);
        P1.A.leftCols(n) = P.A;
        P1.b = P.b;
        P1.G = MatrixXd::Zero(P.G.rows(), n + 1);
        P1.G.leftCols(n) = P.G;
        P1.G.col(n).setConstant(-1.0);
        P1.h = P.h;
        P1.l.resize(n + 1);
        P1.u.resize(n + 1);
        P1.l.head(n) = P.l;
        P1.u.head(n) = P.u;
        double e0 = worst + 1.0;
        P1.l(n) = -1.0;
        P1.u(n) = e0 + 1.0;
        VectorXd z0(n + 1);
        z0.head(n) = x0;
        z0(n) = e0;
        const double margin = 1e-6;
        auto stop = [&](const IpmOutcome& s, const Residuals& R) {
            return s.x(n) < -margin && inf_norm(R.rp) < 0.5 * margin && inf_norm(R.re) < 1e-9 * (1.0 + inf_norm(P.b));
        };
        IpmOutcome o1 = run_ipm(P1, z0, std::min(opt.tol, 1e-9), opt.max_iter, stop);
        total_iter += o1.iterations;
        if (!o1.stopped_early) {
            double ub = certified_bound(P1, o1);  // upper bound on -e*
            if (-ub > opt.tol) {
                res.status = SolveStatus::Infeasible;
                res.iterations = total_iter;
                return res;
            }
        }
        x0 = o1.x.head(n);
        for (Eigen::Index k = 0; k < n; ++k) {
            double width = P.u(k) - P.l(k);
            x0(k) = std::clamp(x0(k), P.l(k) + 1e-9 * width, P.u(k) - 1e-9 * width);
        }
    }

    IpmOutcome o = run_ipm(P, x0, opt.tol, opt.max_iter);
    total_iter += o.iterations;
    res.iterations = total_iter;
    res.kkt_residual = o.kkt;
    res.x = expand(o.x);
    res.value = p.objective(res.x);
    res.bound = std::max(certified_bound(P, o), res.value);
    if (!std::isfinite(F.constant)) {
        res.value = -kInf;
        res.bound = -kInf;
    }
    res.status = o.converged ? SolveStatus::Feasible : SolveStatus::IterationLimit;
    return res;
}

// ---------------------------------------------------------------------------
// Reciprocal allocation programs.

bool ReciprocalProgram::has_upper_bounds() const {
    return std::any_of(terms.begin(), terms.end(), [](const ReciprocalTerm& t) { return t.upper.has_value(); });
}

namespace {

std::vector<double> group_betas(const ReciprocalProgram& p, const std::vector<double>& r) {
    std::vector<double> beta(static_cast<std::size_t>(p.num_groups), 0.0);
    for (std::size_t t = 0; t < p.terms.size(); ++t) {
        const auto& term = p.terms[t];
        if (term.numerator == 0.0) continue;
        beta[static_cast<std::size_t>(term.group)] += r[t] > 0.0 ? term.numerator / r[t] : kInf;
    }
    return beta;
}

}  // namespace

ReciprocalResult solve_reciprocal_spectral(const ReciprocalProgram& p) {
    if (p.has_upper_bounds()) throw std::invalid_argument("spectral reciprocal solver does not take upper bounds");
    const int G = p.num_groups;
    const int K = static_cast<int>(p.capacity.size());
    ReciprocalResult res;
    res.r.assign(p.terms.size(), 0.0);

    // Several terms of one (group, resource) pair share optimally as (sum sqrt n)^2.
    std::vector<double> root(static_cast<std::size_t>(G * K), 0.0);
    for (const auto& t : p.terms)
        if (t.numerator > 0.0) root[static_cast<std::size_t>(t.group * K + t.resource)] += std::sqrt(t.numerator);

    // Connected blocks of groups and resources sharing positive demand.
    std::vector<int> parent(static_cast<std::size_t>(G + K));
    for (int i = 0; i < G + K; ++i) parent[static_cast<std::size_t>(i)] = i;
    std::function<int(int)> find = [&](int a) {
        while (parent[static_cast<std::size_t>(a)] != a) a = parent[static_cast<std::size_t>(a)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
        return a;
    };
    for (int g = 0; g < G; ++g)
        for (int k = 0; k < K; ++k)
            if (root[static_cast<std::size_t>(g * K + k)] > 0.0) parent[static_cast<std::size_t>(find(g))] = find(G + k);

    std::vector<double> a_of(static_cast<std::size_t>(G * K), 0.0);  // entries of the normalized matrix
    std::vector<double> gamma_of_group(static_cast<std::size_t>(G), 0.0);
    std::vector<double> share(static_cast<std::size_t>(G * K), 0.0);  // allocation per (group, resource)

    std::vector<bool> done(static_cast<std::size_t>(G + K), false);
    for (int g0 = 0; g0 < G; ++g0) {
        int rep = find(g0);
        if (done[static_cast<std::size_t>(rep)]) continue;
        done[static_cast<std::size_t>(rep)] = true;
        std::vector<int> gs, ks;
        for (int g = 0; g < G; ++g)
            if (find(g) == rep) gs.push_back(g);
        for (int k = 0; k < K; ++k)
            if (find(G + k) == rep) ks.push_back(k);
        if (ks.empty()) continue;  // groups without demand
        MatrixXd A = MatrixXd::Zero(static_cast<Eigen::Index>(gs.size()), static_cast<Eigen::Index>(ks.size()));
        for (std::size_t a = 0; a < gs.size(); ++a)
            for (std::size_t c = 0; c < ks.size(); ++c) {
                double rt = root[static_cast<std::size_t>(gs[a] * K + ks[c])];
                double cap = p.capacity[static_cast<std::size_t>(ks[c])];
                A(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(c)) = rt > 0.0 ? rt / std::sqrt(cap) : 0.0;
            }
        Eigen::SelfAdjointEigenSolver<MatrixXd> eig(A.transpose() * A);
        Eigen::Index top = eig.eigenvalues().size() - 1;
        double gamma = eig.eigenvalues()(top);
        VectorXd v = eig.eigenvectors().col(top).cwiseAbs();
        // Power refinement keeps the Perron vector strictly positive.
        MatrixXd AtA = A.transpose() * A;
        for (int it = 0; it < 3; ++it) {
            VectorXd nv = AtA * v;
            double nn = nv.norm();
            if (!(nn > 0.0)) break;
            v = nv / nn;
        }
        gamma = v.dot(AtA * v) / v.squaredNorm();
        VectorXd Av = A * v;
        for (std::size_t a = 0; a < gs.size(); ++a) {
            gamma_of_group[static_cast<std::size_t>(gs[a])] = gamma;
            for (std::size_t c = 0; c < ks.size(); ++c) {
                double Agk = A(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(c));
                if (Agk == 0.0) continue;
                double cap = p.capacity[static_cast<std::size_t>(ks[c])];
                // r = sqrt(n R) / v_k * (Av)_g / gamma, written through A = sqrt(n / R).
                share[static_cast<std::size_t>(gs[a] * K + ks[c])] =
                    Agk * cap / v(static_cast<Eigen::Index>(c)) * Av(static_cast<Eigen::Index>(a)) / gamma;
            }
        }
        res.gamma = std::max(res.gamma, gamma);
    }

    for (std::size_t t = 0; t < p.terms.size(); ++t) {
        const auto& term = p.terms[t];
        if (!(term.numerator > 0.0)) continue;
        double rt = root[static_cast<std::size_t>(term.group * K + term.resource)];
        res.r[t] = share[static_cast<std::size_t>(term.group * K + term.resource)] * std::sqrt(term.numerator) / rt;
    }
    res.beta = group_betas(p, res.r);
    double worst = 0.0;
    for (double b : res.beta) worst = std::max(worst, b);
    res.kkt_residual = res.gamma > 0.0 ? std::abs(worst - res.gamma) / res.gamma : 0.0;
    res.gamma = std::max(res.gamma, worst);
    res.lower_bound = res.gamma * (1.0 - 1e-12);
    return res;
}

ReciprocalResult solve_reciprocal_barrier(const ReciprocalProgram& p, double tol, int max_iter) {
    const int G = p.num_groups;
    const int K = static_cast<int>(p.capacity.size());
    ReciprocalResult res;
    res.r.assign(p.terms.size(), 0.0);

    std::vector<int> vars;  // active terms
    for (std::size_t t = 0; t < p.terms.size(); ++t)
        if (p.terms[t].numerator > 0.0) vars.push_back(static_cast<int>(t));
    const auto nv = static_cast<Eigen::Index>(vars.size());
    if (nv == 0) {
        res.beta.assign(static_cast<std::size_t>(G), 0.0);
        return res;
    }
    std::vector<int> count(static_cast<std::size_t>(K), 0);
    for (int t : vars) ++count[static_cast<std::size_t>(p.terms[static_cast<std::size_t>(t)].resource)];

    // Variables: r for active terms, then gamma.
    VectorXd z(nv + 1);
    for (Eigen::Index k = 0; k < nv; ++k) {
        const auto& term = p.terms[static_cast<std::size_t>(vars[static_cast<std::size_t>(k)])];
        double r = p.capacity[static_cast<std::size_t>(term.resource)] / (count[static_cast<std::size_t>(term.resource)] + 1.0);
        if (term.upper) r = std::min(r, 0.5 * *term.upper);
        z(k) = r;
    }
    auto betas = [&](const VectorXd& zz) {
        std::vector<double> b(static_cast<std::size_t>(G), 0.0);
        for (Eigen::Index k = 0; k < nv; ++k) {
            const auto& term = p.terms[static_cast<std::size_t>(vars[static_cast<std::size_t>(k)])];
            b[static_cast<std::size_t>(term.group)] += term.numerator / zz(k);
        }
        return b;
    };
    {
        auto b = betas(z);
        z(nv) = 1.0 + *std::max_element(b.begin(), b.end()) * 1.5;
    }
    std::vector<bool> group_active(static_cast<std::size_t>(G), false);
    for (int t : vars) group_active[static_cast<std::size_t>(p.terms[static_cast<std::size_t>(t)].group)] = true;
    int m = 0;
    for (bool a : group_active) m += a;
    for (int k = 0; k < K; ++k) m += count[static_cast<std::size_t>(k)] > 0;
    for (int t : vars) m += 1 + (p.terms[static_cast<std::size_t>(t)].upper ? 1 : 0);

    auto barrier = [&](const VectorXd& zz, double tt) {
        double f = tt * zz(nv);
        auto b = betas(zz);
        for (int g = 0; g < G; ++g) {
            if (!group_active[static_cast<std::size_t>(g)]) continue;
            double s = zz(nv) - b[static_cast<std::size_t>(g)];
            if (!(s > 0.0)) return kInf;
            f -= std::log(s);
        }
        std::vector<double> used(static_cast<std::size_t>(K), 0.0);
        for (Eigen::Index k = 0; k < nv; ++k) {
            const auto& term = p.terms[static_cast<std::size_t>(vars[static_cast<std::size_t>(k)])];
            if (!(zz(k) > 0.0)) return kInf;
            f -= std::log(zz(k));
            if (term.upper) {
                double s = *term.upper - zz(k);
                if (!(s > 0.0)) return kInf;
                f -= std::log(s);
            }
            used[static_cast<std::size_t>(term.resource)] += zz(k);
        }
        for (int k = 0; k < K; ++k) {
            if (!count[static_cast<std::size_t>(k)]) continue;
            double s = p.capacity[static_cast<std::size_t>(k)] - used[static_cast<std::size_t>(k)];
            if (!(s > 0.0)) return kInf;
            f -= std::log(s);
        }
        return f;
    };

    double tt = 1.0;
    int iters = 0;
    while (true) {
        // Centering by damped Newton.
        for (int inner = 0; inner < 200 && iters < max_iter; ++inner, ++iters) {
            VectorXd grad = VectorXd::Zero(nv + 1);
            MatrixXd H = MatrixXd::Zero(nv + 1, nv + 1);
            grad(nv) = tt;
            auto b = betas(z);
            // Delay rows: -ln(gamma - beta_g).
            std::vector<std::vector<Eigen::Index>> members(static_cast<std::size_t>(G));
            for (Eigen::Index k = 0; k < nv; ++k)
                members[static_cast<std::size_t>(p.terms[static_cast<std::size_t>(vars[static_cast<std::size_t>(k)])].group)].push_back(k);
            for (int g = 0; g < G; ++g) {
                if (!group_active[static_cast<std::size_t>(g)]) continue;
                double s = z(nv) - b[static_cast<std::size_t>(g)];
                VectorXd ds = VectorXd::Zero(nv + 1);  // gradient of s
                ds(nv) = 1.0;
                for (Eigen::Index k : members[static_cast<std::size_t>(g)]) {
                    double num = p.terms[static_cast<std::size_t>(vars[static_cast<std::size_t>(k)])].numerator;
                    ds(k) = num / (z(k) * z(k));
                    H(k, k) += (2.0 * num / (z(k) * z(k) * z(k))) / s;  // -(1/s) * d2s, d2s = -2n/r^3
                }
                grad -= ds / s;
                H += ds * ds.transpose() / (s * s);
            }
            std::vector<double> used(static_cast<std::size_t>(K), 0.0);
            for (Eigen::Index k = 0; k < nv; ++k) {
                const auto& term = p.terms[static_cast<std::size_t>(vars[static_cast<std::size_t>(k)])];
                grad(k) -= 1.0 / z(k);
                H(k, k) += 1.0 / (z(k) * z(k));
                if (term.upper) {
                    double s = *term.upper - z(k);
                    grad(k) += 1.0 / s;
                    H(k, k) += 1.0 / (s * s);
                }
                used[static_cast<std::size_t>(term.resource)] += z(k);
            }
            for (int k = 0; k < K; ++k) {
                if (!count[static_cast<std::size_t>(k)]) continue;
                double s = p.capacity[static_cast<std::size_t>(k)] - used[static_cast<std::size_t>(k)];
                for (Eigen::Index a = 0; a < nv; ++a) {
                    if (p.terms[static_cast<std::size_t>(vars[static_cast<std::size_t>(a)])].resource != k) continue;
                    grad(a) += 1.0 / s;
                    for (Eigen::Index c = 0; c < nv; ++c)
                        if (p.terms[static_cast<std::size_t>(vars[static_cast<std::size_t>(c)])].resource == k) H(a, c) += 1.0 / (s * s);
                }
            }
            Eigen::LDLT<MatrixXd> ldlt(H);
            VectorXd dz = -ldlt.solve(grad);
            double dec = -grad.dot(dz);
            if (!(dec > 0.0) || dec / 2.0 <= 1e-12) break;
            double step = 1.0, f0 = barrier(z, tt);
            while (step > 1e-16) {
                VectorXd zn = z + step * dz;
                double fn = barrier(zn, tt);
                if (std::isfinite(fn) && fn <= f0 - 0.25 * step * dec) break;
                step *= 0.5;
            }
            if (step <= 1e-16) break;
            z += step * dz;
        }
        if (static_cast<double>(m) / tt < tol * std::max(1.0, z(nv)) || iters >= max_iter) break;
        tt *= 8.0;
    }
    res.iterations = iters;
    for (Eigen::Index k = 0; k < nv; ++k) res.r[static_cast<std::size_t>(vars[static_cast<std::size_t>(k)])] = z(k);
    res.beta = group_betas(p, res.r);
    res.gamma = *std::max_element(res.beta.begin(), res.beta.end());
    double gap = static_cast<double>(m) / tt;
    res.lower_bound = std::max(0.0, z(nv) - gap);
    res.kkt_residual = gap / std::max(1.0, res.gamma);
    if (iters >= max_iter) res.status = SolveStatus::IterationLimit;
    return res;
}

ReciprocalResult solve_reciprocal(const ReciprocalProgram& p, double tol) {
    return p.has_upper_bounds() ? solve_reciprocal_barrier(p, tol) : solve_reciprocal_spectral(p);
}

// ---------------------------------------------------------------------------

double hessian_form_exact(double x, double r, double v1, double v2) {
    double d = v1 - v2 * x / r;
    return 2.0 / r * d * d;
}

double hessian_form_fd(double x, double r, double v1, double v2) {
    using L = long double;
    auto g = [&](L t) {
        L a = static_cast<L>(x) + t * static_cast<L>(v1);
        L b = static_cast<L>(r) + t * static_cast<L>(v2);
        return a * a / b;
    };
    auto second = [&](L h) { return (g(h) - 2.0L * g(0.0L) + g(-h)) / (h * h); };
    const L h = 1e-3L;
    // Richardson extrapolation removes the h^2 error term.
    L fine = second(h / 2.0L), coarse = second(h);
    return static_cast<double>((4.0L * fine - coarse) / 3.0L);
}

HessianReport verify_hessian_psd(int samples, std::uint64_t seed, double tol) {
    HessianReport rep;
    rep.samples = samples;
    rep.min_form = kInf;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(0.0, 1.0), ur(0.5, 5.0);
    std::normal_distribution<double> nv(0.0, 1.0);
    for (int i = 0; i < samples; ++i) {
        double x = ux(rng), r = ur(rng);
        double v1 = nv(rng), v2 = nv(rng);
        double len = std::hypot(v1, v2);
        if (len > 0.0) {
            v1 /= len;
            v2 /= len;
        }
        // Every fourth sample probes the null direction (x/r, 1).
        if (i % 4 == 3) {
            v1 = x / r;
            v2 = 1.0;
        }
        double fd = hessian_form_fd(x, r, v1, v2);
        double ex = hessian_form_exact(x, r, v1, v2);
        rep.min_form = std::min(rep.min_form, fd);
        rep.max_abs_error = std::max(rep.max_abs_error, std::abs(fd - ex));
        if (fd < -tol) {
            std::ostringstream os;
            os << "x=" << x << " r=" << r << " v=(" << v1 << "," << v2 << ") form=" << fd;
            rep.violations.push_back(os.str());
        }
    }
    return rep;
}

}  // namespace fairoffload
