#pragma once

#include <functional>
#include <string>
#include <vector>

#include "scuc/formulation.hpp"
#include "scuc/instance.hpp"
#include "scuc/milp.hpp"
#include "scuc/network.hpp"
#include "scuc/schedule.hpp"
#include "scuc/separation.hpp"

namespace scuc {

/// The four-way horizon split. Windows are period ranges over [1, T]:
/// fixed (1, s_F], integer (s_F, s_F+s_I], relaxed (s_F+s_I, s_F+s_I+s_R];
/// everything beyond is deferred. s_F starts at -advance_step so the first
/// advance lands on an empty fixed window.
struct WindowPartition {
    int fixed_len = 0;    // s_F
    int integer_len = 0;  // s_I
    int relaxed_len = 0;  // s_R
    int advance_step = 1; // delta t
    int horizon = 0;      // T

    int integer_lo() const { return fixed_len + 1; }
    int integer_hi() const { return fixed_len + integer_len; }
    int relaxed_lo() const { return fixed_len + integer_len + 1; }
    int relaxed_hi() const { return fixed_len + integer_len + relaxed_len; }
    /// A subproblem is formed only when the whole integer+relaxed span fits.
    bool fits() const { return fixed_len + integer_len + relaxed_len <= horizon; }
};

/// Shifts the fixed boundary by the advance step; integer and relaxed windows
/// move with it.
WindowPartition advance(WindowPartition partition);

/// The committed slice of a subproblem solution: values over local periods
/// 1..len (len = advance step). Commitments must be integral within 1e-6.
struct WindowSolution {
    int len = 0;
    std::vector<std::vector<double>> x;  // [g][0..len)
    std::vector<std::vector<double>> p;  // [g][0..len)
};

/// State propagation across a subproblem boundary: carries commitment, power,
/// and the remaining minimum up/down obligations, with consecutive-duration
/// counters accumulated across boundaries when a unit's state is uniform over
/// the whole window and matches its boundary state.
BoundaryState propagate_state(const BoundaryState& prev, const WindowSolution& window,
                              const Instance& instance);

struct RelaxCutParams {
    int integer_len = 6;     // initial integer window size
    int relaxed_len = 6;     // relaxed lookahead size
    int advance_step = 6;    // periods committed per subproblem
    int integer_growth = 2;  // integer window enlargement per restart
};

struct SubproblemLog {
    int restart = 0;     // restart epoch the subproblem ran in
    int iteration = 0;   // 1-based within the epoch; 0 marks the completion solve
    int window_start = 0;
    int window_len = 0;
    int integer_len = 0;
    bool completion = false;
    SolveStatus status = SolveStatus::infeasible;
    double objective = 0.0;
    long cuts = 0;
    double wall_seconds = 0.0;
};

struct RelaxCutResult {
    Schedule schedule;
    int subproblems = 0;
    int restarts = 0;
    long cuts_total = 0;
    double wall_seconds = 0.0;
    std::vector<SubproblemLog> log;
    std::vector<PooledCut> cuts;  // pooled rows with periods translated to global
};

/// Observer invoked after each committed slice with the partial schedule and
/// the number of committed periods; used to audit fixed-prefix immutability.
using ProgressObserver = std::function<void(const Schedule& partial, int committed)>;

/// The relax-and-cut horizon sweep: solve partially relaxed subproblems over
/// advancing windows, commit the first advance_step periods of each, complete
/// the tail with a fully integer solve, and on any infeasible subproblem
/// restart from scratch with the integer window enlarged. Throws SolverError
/// when the instance stays infeasible with the integer window at T.
RelaxCutResult run_relax_and_cut(const Instance& instance, const SensitivitySet& sens,
                                 const RelaxCutParams& params, const SolveControls& sub_controls,
                                 SeparationMode mode = SeparationMode::dynamic,
                                 int cut_cap_per_period = 15,
                                 const ProgressObserver& observer = {});

}  // namespace scuc
