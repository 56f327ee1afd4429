#pragma once

#include <string>
#include <vector>

#include "scuc/instance.hpp"
#include "scuc/milp.hpp"
#include "scuc/network.hpp"
#include "scuc/schedule.hpp"
#include "scuc/separation.hpp"

namespace scuc {

struct RefineControls {
    double gap = 0.001;            // sub-MILP gap
    double time_budget_s = 3600.0;
    int max_passes = 0;            // 0 = run until converged
    double min_pass_improvement = 1e-4;  // stop when a full pass improves less
    int cut_cap_per_period = 15;
    int threads = 0;
    double lp_pivot_tol = 1e-9;
};

struct RefineTraceRow {
    int pass;
    int window_start;  // 1-based global period
    bool accepted;
    double objective;  // incumbent objective after this window
};

struct RefineResult {
    Schedule schedule;
    bool truncated = false;  // time budget expired mid-pass
    int passes = 0;
    int windows_solved = 0;
    int accepted = 0;
    std::vector<RefineTraceRow> trace;
};

/// Sliding-window neighborhood search over a feasible schedule: each window
/// re-opens integer freedom for the commitments inside it, fixes everything
/// outside to the incumbent, solves with full lazy security enforcement and
/// accepts only strict objective improvements. Left-to-right windows, wrapping
/// into new passes until a pass improves less than min_pass_improvement or
/// the time budget runs out.
RefineResult rins_refine(const Instance& instance, const SensitivitySet& sens,
                         const Schedule& incumbent, int window_len, int stride,
                         const RefineControls& controls);

std::string dump_refine_trace_csv(const RefineResult& result);

}  // namespace scuc
