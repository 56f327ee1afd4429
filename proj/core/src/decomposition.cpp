#include "scuc/decomposition.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "scuc/errors.hpp"
#include "scuc/log.hpp"

namespace scuc {

WindowPartition advance(WindowPartition p) {
    p.fixed_len += p.advance_step;
    return p;
}

BoundaryState propagate_state(const BoundaryState& prev, const WindowSolution& win,
                              const Instance& inst) {
    const int G = static_cast<int>(inst.generators.size());
    if (prev.size() != static_cast<size_t>(G) || win.x.size() != static_cast<size_t>(G) ||
        win.p.size() != static_cast<size_t>(G))
        throw InvariantError("propagate_state: generator dimension mismatch");
    if (win.len < 1) throw InvariantError("propagate_state: window must cover at least one period");

    BoundaryState next(G);
    for (int g = 0; g < G; ++g) {
        if (static_cast<int>(win.x[g].size()) != win.len ||
            static_cast<int>(win.p[g].size()) != win.len)
            throw InvariantError("propagate_state: window arrays must cover exactly the window");
        std::vector<int> xi(win.len);
        for (int t = 0; t < win.len; ++t) {
            double v = win.x[g][t];
            if (std::abs(v - std::round(v)) > 1e-6)
                throw InvariantError("propagate_state: fractional commitment for generator " +
                                     inst.generators[g].id + " at window period " +
                                     std::to_string(t + 1));
            xi[t] = static_cast<int>(std::round(v));
        }

        const Generator& gen = inst.generators[g];
        GenBoundary& b = next[g];
        b.on = xi[win.len - 1] == 1;
        b.power = b.on ? win.p[g][win.len - 1] : 0.0;

        // Consecutive duration ending at the window's last period, carried
        // across the boundary when the state is uniform over the whole window
        // and matches the previous boundary state.
        int run = 0;
        for (int t = win.len - 1; t >= 0 && xi[t] == xi[win.len - 1]; --t) ++run;
        bool uniform = run == win.len;
        if (b.on) {
            int served = run + ((uniform && prev[g].on) ? prev[g].cum_up : 0);
            b.min_up_remaining = std::max(0, gen.min_up - served);
            b.min_down_remaining = 0;
            b.cum_up = served;
            b.cum_down = 0;
        } else {
            int rested = run + ((uniform && !prev[g].on) ? prev[g].cum_down : 0);
            b.min_down_remaining = std::max(0, gen.min_down - rested);
            b.min_up_remaining = 0;
            b.cum_down = rested;
            b.cum_up = 0;
        }
    }
    return next;
}

namespace {

struct PartialSchedule {
    Schedule sched;
    int committed = 0;

    explicit PartialSchedule(const Instance& inst) : sched(Schedule::zeros(inst)) {}

    void append(const Instance& inst, const ModelSpec& model, const std::vector<double>& solution,
                int periods, PeriodProvenance prov) {
        const VarLayout& lay = model.layout;
        for (int t = 1; t <= periods; ++t) {
            int gt = committed + t - 1;  // 0-based global period
            for (int g = 0; g < lay.gens; ++g) {
                sched.x[g][gt] = static_cast<uint8_t>(std::lround(solution[lay.commit(g, t)]));
                sched.p[g][gt] = solution[lay.dispatch(g, t)];
            }
            for (int b = 0; b < lay.buses; ++b)
                sched.curtail[b][gt] = solution[lay.curtail(b, t)];
            sched.provenance[gt] = prov;
        }
        committed += periods;
    }
};

std::string window_str(int start, int len) {
    std::ostringstream os;
    os << (start + 1) << ".." << (start + len);
    return os.str();
}

}  // namespace

RelaxCutResult run_relax_and_cut(const Instance& inst, const SensitivitySet& sens,
                                 const RelaxCutParams& params, const SolveControls& sub_controls,
                                 SeparationMode mode, int cut_cap_per_period,
                                 const ProgressObserver& observer) {
    const int T = inst.horizon;
    if (params.integer_len < 1 || params.advance_step < 1 || params.integer_growth < 1 ||
        params.relaxed_len < 0)
        throw InvariantError("relax-and-cut: window parameters must be positive");
    if (params.advance_step > params.integer_len)
        throw InvariantError("relax-and-cut: advance step must not exceed the integer window");

    auto clock_start = std::chrono::steady_clock::now();
    RelaxCutResult result;
    int s_int = std::min(params.integer_len, T);
    const int s_rel = params.relaxed_len;

    for (;;) {
        PartialSchedule partial(inst);
        BoundaryState theta = initial_boundary(inst);
        bool epoch_failed = false;
        int iteration = 0;
        SubproblemLog failed_log{};

        auto solve_window = [&](int start, int len, int integer_prefix, bool completion) {
            auto t0 = std::chrono::steady_clock::now();
            SecureSolveResult sub = solve_secure(inst, sens, start, len, theta, integer_prefix,
                                                 mode, sub_controls, cut_cap_per_period);
            SubproblemLog lg;
            lg.restart = result.restarts;
            lg.iteration = completion ? 0 : iteration;
            lg.window_start = start;
            lg.window_len = len;
            lg.integer_len = integer_prefix;
            lg.completion = completion;
            lg.status = sub.outcome.status;
            lg.objective = sub.outcome.incumbent ? sub.outcome.objective : 0.0;
            lg.cuts = sub.outcome.stats.cuts_added;
            lg.wall_seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            result.log.push_back(lg);
            ++result.subproblems;
            result.cuts_total += sub.outcome.stats.cuts_added;
            for (PooledCut cut : sub.pool.entries()) {
                cut.id.period += start;  // report pooled rows in global periods
                result.cuts.push_back(cut);
            }
            log::info("rnc restart=", result.restarts, " iter=", completion ? 0 : iteration,
                      " window=", window_str(start, len), " integer=",
                      window_str(start, integer_prefix), " status=",
                      status_name(sub.outcome.status), " obj=", lg.objective, " cuts=", lg.cuts,
                      " time_s=", lg.wall_seconds);
            return sub;
        };

        // Advance the integer+relaxed window while it fits inside the horizon.
        while (partial.committed + s_int + s_rel <= T) {
            ++iteration;
            const int start = partial.committed;
            const int len = s_int + s_rel;
            const bool covers_tail = (start + len == T) && (s_rel == 0);
            SecureSolveResult sub = solve_window(start, len, s_int, covers_tail);
            if (!sub.outcome.incumbent) {
                epoch_failed = true;
                failed_log = result.log.back();
                break;
            }
            if (covers_tail) {
                // The window is fully integer and reaches the end of the
                // horizon, so it doubles as the completion solve.
                partial.append(inst, sub.model, *sub.outcome.incumbent, len,
                               {PeriodProvenance::Kind::final_completion, 0});
                if (observer) observer(partial.sched, partial.committed);
                break;
            }
            const VarLayout& lay = sub.model.layout;
            partial.append(inst, sub.model, *sub.outcome.incumbent, params.advance_step,
                           {PeriodProvenance::Kind::fixed_at_iteration, iteration});
            if (observer) observer(partial.sched, partial.committed);

            WindowSolution win;
            win.len = params.advance_step;
            win.x.assign(lay.gens, {});
            win.p.assign(lay.gens, {});
            for (int g = 0; g < lay.gens; ++g)
                for (int t = 1; t <= params.advance_step; ++t) {
                    win.x[g].push_back((*sub.outcome.incumbent)[lay.commit(g, t)]);
                    win.p[g].push_back((*sub.outcome.incumbent)[lay.dispatch(g, t)]);
                }
            theta = propagate_state(theta, win, inst);
        }

        // Complete the remaining tail with every commitment integer.
        if (!epoch_failed && partial.committed < T) {
            ++iteration;
            const int start = partial.committed;
            const int len = T - start;
            SecureSolveResult sub = solve_window(start, len, len, true);
            if (!sub.outcome.incumbent) {
                epoch_failed = true;
                failed_log = result.log.back();
            } else {
                partial.append(inst, sub.model, *sub.outcome.incumbent, len,
                               {PeriodProvenance::Kind::final_completion, 0});
                if (observer) observer(partial.sched, partial.committed);
            }
        }

        if (!epoch_failed) {
            result.schedule = std::move(partial.sched);
            recompute_transitions(result.schedule, inst);
            result.schedule.breakdown = objective_breakdown(inst, result.schedule);
            result.schedule.objective = result.schedule.breakdown.total();
            result.wall_seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - clock_start)
                    .count();
            return result;
        }

        if (s_int >= T) {
            std::ostringstream os;
            os << "relax-and-cut: instance infeasible even with the integer window covering the "
                  "whole horizon; failing subproblem window="
               << window_str(failed_log.window_start, failed_log.window_len)
               << " status=" << status_name(failed_log.status);
            throw SolverError(os.str());
        }
        ++result.restarts;
        s_int = std::min(s_int + params.integer_growth, T);
        log::warn("rnc restart=", result.restarts, " enlarging integer window to ", s_int,
                  " after infeasible subproblem at window=",
                  window_str(failed_log.window_start, failed_log.window_len));
    }
}

}  // namespace scuc
