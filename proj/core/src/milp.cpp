#include "scuc/milp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <set>

#include "scuc/errors.hpp"
#include "scuc/log.hpp"

namespace scuc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void model_to_lp(const ModelSpec& m, SimplexSolver& lp, double pivot_tol) {
    const int n = static_cast<int>(m.variables.size());
    std::vector<double> lo(n), up(n), obj(n, 0.0);
    for (int j = 0; j < n; ++j) {
        lo[j] = m.variables[j].lo;
        up[j] = m.variables[j].hi;
    }
    for (const LinTerm& t : m.objective) obj[t.var] += t.coef;
    std::vector<LpRowDef> rows;
    rows.reserve(m.constraints.size());
    for (const Constraint& c : m.constraints) rows.push_back({c.terms, c.sense, c.rhs});
    SimplexSolver::Options opts;
    opts.pivot_tol = pivot_tol;
    lp.load(std::move(lo), std::move(up), std::move(obj), rows, opts);
}

struct Clock {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

}  // namespace

const char* status_name(SolveStatus s) {
    switch (s) {
        case SolveStatus::optimal_within_gap: return "optimal-within-gap";
        case SolveStatus::feasible_time_limit: return "feasible-time-limit";
        case SolveStatus::infeasible: return "infeasible";
        case SolveStatus::unbounded: return "unbounded";
    }
    return "?";
}

SolveOutcome solve_lp(const ModelSpec& model, const SolveControls& controls) {
    Clock clock;
    SimplexSolver lp;
    model_to_lp(model, lp, controls.lp_pivot_tol);
    LpStatus st = lp.solve();
    SolveOutcome out;
    out.stats.simplex_iterations = lp.iterations();
    out.stats.wall_seconds = clock.seconds();
    switch (st) {
        case LpStatus::optimal:
            out.status = SolveStatus::optimal_within_gap;
            out.incumbent = lp.column_values();
            out.objective = lp.objective() + model.objective_constant;
            out.best_bound = out.objective;
            break;
        case LpStatus::infeasible:
            out.status = SolveStatus::infeasible;
            break;
        case LpStatus::unbounded:
            out.status = SolveStatus::unbounded;
            out.best_bound = -kInf;
            break;
        case LpStatus::iteration_limit:
            throw SolverError("lp solve hit the iteration limit");
    }
    return out;
}

SolveOutcome solve_milp(const ModelSpec& model, const SolveControls& controls,
                        const CutCallback& on_integer_solution) {
    Clock clock;
    SolveOutcome out;
    SolveStats& stats = out.stats;

    SimplexSolver lp;
    model_to_lp(model, lp, controls.lp_pivot_tol);

    std::vector<int> integer_cols;
    for (size_t j = 0; j < model.variables.size(); ++j)
        if (model.variables[j].domain == Domain::binary) integer_cols.push_back(static_cast<int>(j));

    struct Node {
        double bound;
        int depth;
        long parent;       // index into nodes, -1 for root
        int branch_var;    // bound change relative to the parent
        double blo, bhi;
        std::shared_ptr<std::vector<uint8_t>> basis;  // basis after the parent's last LP
        bool open = true;
    };
    std::vector<Node> nodes;
    nodes.push_back({-kInf, 0, -1, -1, 0.0, 0.0, nullptr});

    std::set<std::pair<double, long>> open;  // (bound, node id), min-bound first
    open.insert({-kInf, 0});

    std::vector<LpRowDef> pool;   // injected cuts, shared by the whole tree
    size_t lp_pool_rows = 0;      // how many pool rows the LP already carries

    double incumbent_obj = kInf;
    std::optional<std::vector<double>> incumbent;
    bool plunging = true;
    long plunge_next = -1;
    double last_bound_report = -kInf;
    bool hit_limit = false;

    // Bound bookkeeping: restore to root bounds, then apply a node's chain.
    std::vector<std::pair<int, std::pair<double, double>>> applied;
    auto switch_to_node = [&](long nid) {
        for (const auto& [var, b] : applied)
            lp.set_bounds(var, model.variables[var].lo, model.variables[var].hi);
        applied.clear();
        std::vector<long> chain;
        for (long c = nid; c >= 0; c = nodes[c].parent)
            if (nodes[c].branch_var >= 0) chain.push_back(c);
        for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
            const Node& nd = nodes[*it];
            lp.set_bounds(nd.branch_var, nd.blo, nd.bhi);
            applied.push_back({nd.branch_var, {nd.blo, nd.bhi}});
        }
    };

    auto accept_incumbent = [&](const std::vector<double>& a, double objv) {
        if (objv > incumbent_obj + 1e-9) stats.incumbent_monotone = false;
        incumbent = a;
        incumbent_obj = objv;
        plunging = false;
        plunge_next = -1;
    };

    while (!open.empty()) {
        double global_bound = std::min(open.begin()->first, incumbent_obj);
        if (global_bound < last_bound_report - 1e-9 * std::max(1.0, std::abs(global_bound)))
            stats.bound_monotone = false;
        last_bound_report = std::max(last_bound_report, global_bound);

        if (incumbent &&
            (incumbent_obj - global_bound) <= controls.mip_gap * std::max(1.0, std::abs(incumbent_obj)))
            break;
        if (clock.seconds() > controls.time_limit_s ||
            (controls.node_limit > 0 && stats.nodes >= controls.node_limit)) {
            hit_limit = true;
            break;
        }

        long nid;
        if (plunging && plunge_next >= 0 && nodes[plunge_next].open) {
            nid = plunge_next;
            open.erase({nodes[nid].bound, nid});
        } else {
            nid = open.begin()->second;
            open.erase(open.begin());
        }
        plunge_next = -1;
        nodes[nid].open = false;

        if (incumbent && nodes[nid].bound >= incumbent_obj - 1e-9 * std::max(1.0, std::abs(incumbent_obj)))
            continue;  // cannot improve

        ++stats.nodes;
        switch_to_node(nid);
        if (nodes[nid].basis) lp.restore_basis(*nodes[nid].basis);
        while (lp_pool_rows < pool.size()) lp.add_row(pool[lp_pool_rows++]);

        bool fathomed = false;
        double node_obj = 0.0;
        while (true) {
            LpStatus st = lp.solve();
            if (st == LpStatus::infeasible) {
                fathomed = true;
                break;
            }
            if (st == LpStatus::unbounded) {
                if (nid == 0 && !incumbent) {
                    out.status = SolveStatus::unbounded;
                    out.best_bound = -kInf;
                    out.stats.simplex_iterations = lp.iterations();
                    out.stats.wall_seconds = clock.seconds();
                    return out;
                }
                throw SolverError("milp: unbounded node below a bounded root");
            }
            if (st == LpStatus::iteration_limit) throw SolverError("milp: node LP hit iteration limit");

            node_obj = lp.objective() + model.objective_constant;
            if (incumbent && node_obj >= incumbent_obj - 1e-9 * std::max(1.0, std::abs(incumbent_obj))) {
                fathomed = true;
                break;
            }

            const std::vector<double>& vals = lp.column_values();
            int branch_var = -1;
            double branch_val = 0.0;
            double worst = controls.int_tol;
            for (int j : integer_cols) {
                double frac = std::abs(vals[j] - std::round(vals[j]));
                if (frac > worst) {
                    worst = frac;
                    branch_var = j;
                    branch_val = vals[j];
                }
            }

            if (branch_var < 0) {
                // Integer point: round binaries, offer it to the callback.
                std::vector<double> assignment = vals;
                for (int j : integer_cols) assignment[j] = std::round(assignment[j]);
                std::vector<LpRowDef> cuts;
                if (on_integer_solution) {
                    ++stats.callback_calls;
                    try {
                        cuts = on_integer_solution(assignment);
                    } catch (const std::exception& e) {
                        throw SolverError(std::string("milp: integer-solution callback failed: ") +
                                          e.what());
                    }
                }
                if (!cuts.empty()) {
                    for (const LpRowDef& r : cuts) {
                        pool.push_back(r);
                        ++stats.cuts_added;
                    }
                    while (lp_pool_rows < pool.size()) lp.add_row(pool[lp_pool_rows++]);
                    continue;  // re-solve this node against the new cuts
                }
                accept_incumbent(assignment, node_obj);
                fathomed = true;
                break;
            }

            // Branch: children share the basis reached at this node.
            auto basis = std::make_shared<std::vector<uint8_t>>(lp.basis_snapshot());
            double child_bound = std::max(node_obj, nodes[nid].bound);
            int depth = nodes[nid].depth + 1;
            long down_id = static_cast<long>(nodes.size());
            nodes.push_back({child_bound, depth, nid, branch_var, 0.0, 0.0, basis});
            long up_id = static_cast<long>(nodes.size());
            nodes.push_back({child_bound, depth, nid, branch_var, 1.0, 1.0, basis});
            open.insert({child_bound, down_id});
            open.insert({child_bound, up_id});
            if (plunging) plunge_next = (branch_val >= 0.5) ? up_id : down_id;
            break;
        }
        (void)fathomed;
    }

    stats.simplex_iterations = lp.iterations();
    stats.wall_seconds = clock.seconds();

    double remaining_bound = incumbent_obj;
    if (!open.empty()) remaining_bound = std::min(open.begin()->first, incumbent_obj);
    if (incumbent) {
        out.status = hit_limit && (incumbent_obj - remaining_bound) >
                                      controls.mip_gap * std::max(1.0, std::abs(incumbent_obj))
                         ? SolveStatus::feasible_time_limit
                         : SolveStatus::optimal_within_gap;
        out.incumbent = std::move(incumbent);
        out.objective = incumbent_obj;
        out.best_bound = remaining_bound;
    } else if (hit_limit) {
        out.status = SolveStatus::feasible_time_limit;  // limit reached, no incumbent
        out.best_bound = open.empty() ? kInf : open.begin()->first;
    } else {
        out.status = SolveStatus::infeasible;
        out.best_bound = kInf;
    }
    return out;
}

}  // namespace scuc
