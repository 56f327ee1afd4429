#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "scuc/model.hpp"
#include "scuc/simplex.hpp"

namespace scuc {

struct SolveControls {
    double mip_gap = 0.0;          // relative tolerance on (objective - bound)
    double time_limit_s = 86400.0;
    long node_limit = 0;           // 0 = unlimited
    double int_tol = 1e-6;         // integer feasibility tolerance
    double lp_pivot_tol = 1e-9;
    int threads = 0;               // screening parallelism; 0 = hardware concurrency
};

enum class SolveStatus { optimal_within_gap, feasible_time_limit, infeasible, unbounded };

const char* status_name(SolveStatus s);

struct SolveStats {
    long nodes = 0;
    long simplex_iterations = 0;
    long cuts_added = 0;
    long callback_calls = 0;
    double wall_seconds = 0.0;
    // Instrumented invariants: the best bound never decreases and the
    // incumbent objective never increases over a run.
    bool bound_monotone = true;
    bool incumbent_monotone = true;
};

struct SolveOutcome {
    SolveStatus status = SolveStatus::infeasible;
    std::optional<std::vector<double>> incumbent;  // over model variables
    double objective = std::numeric_limits<double>::infinity();
    double best_bound = -std::numeric_limits<double>::infinity();
    SolveStats stats;

    double gap() const {
        return (objective - best_bound) / std::max(1.0, std::abs(objective));
    }
};

/// Called on every integer-feasible point found in the tree, with binaries
/// rounded. Returning rows injects them as cuts over the whole remaining
/// search without restarting it; returning empty accepts the incumbent.
using CutCallback = std::function<std::vector<LpRowDef>(const std::vector<double>&)>;

/// Pure LP solve: all domains treated as continuous.
SolveOutcome solve_lp(const ModelSpec& model, const SolveControls& controls = {});

/// Best-bound branch-and-bound with depth-first plunging until the first
/// incumbent, most-fractional branching (ties by variable order), and a
/// global cut pool that every open node syncs into its LP on its next solve.
/// Single-threaded tree; identical inputs give identical incumbents and
/// node counts.
SolveOutcome solve_milp(const ModelSpec& model, const SolveControls& controls,
                        const CutCallback& on_integer_solution = {});

}  // namespace scuc
