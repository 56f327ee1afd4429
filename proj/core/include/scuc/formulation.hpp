#pragma once

#include <string>
#include <vector>

#include "scuc/instance.hpp"
#include "scuc/model.hpp"
#include "scuc/network.hpp"
#include "scuc/schedule.hpp"

namespace scuc {

/// Generator state at a subproblem boundary. cum_up / cum_down count the
/// consecutive on/off periods ending at the boundary, accumulated across
/// subproblem stitches so minimum up/down bookkeeping survives decomposition.
struct GenBoundary {
    bool on = false;
    int min_up_remaining = 0;    // periods the unit must still stay on
    int min_down_remaining = 0;  // periods the unit must still stay off
    double power = 0.0;          // MW at the boundary period
    int cum_up = 0;
    int cum_down = 0;
};

using BoundaryState = std::vector<GenBoundary>;  // indexed like instance.generators

/// Boundary state at period 0, straight from the instance's initial fields.
/// cum counters seed with the minimum history consistent with the remaining
/// up/down requirement.
BoundaryState initial_boundary(const Instance& instance);

enum class SecurityMode { enumerate_all, lazy };

/// Builds the UC model over model-local periods 1..H, where local period t
/// maps to global period window_start + t. Commitment/start/stop variables are
/// binary for t <= integer_prefix and continuously relaxed in (integer_prefix, H].
/// Line-limit rows are emitted only when security_mode == enumerate_all; the
/// power-balance rows are always present.
ModelSpec build_model(const Instance& instance, int window_start, int horizon_len,
                      const BoundaryState& theta, int integer_prefix, SecurityMode security_mode,
                      const SensitivitySet* sens = nullptr);

/// One security row for a cut id against a built model. Flow terms are
/// expressed over dispatch and curtailment variables; the demand part of the
/// injection moves to the right-hand side.
Constraint security_row(const Instance& instance, const SensitivitySet& sens, const ModelSpec& model,
                        const SecurityCutId& id);

/// Production cost at one (commit, power) point: cost at minimum output plus
/// greedy marginal fill of the convex segments. No-load cost is not included.
double production_cost(const Generator& gen, int commit, double power);

/// Exact objective of a concrete schedule: production + startup + no-load +
/// curtailment penalty.
ObjectiveBreakdown objective_breakdown(const Instance& instance, const Schedule& schedule);
double objective_value(const Instance& instance, const Schedule& schedule);

/// LP-style plain-text dump for debugging (x[g,t], flow_ub[l,t,c], ...).
std::string dump_model_lp(const ModelSpec& model);

}  // namespace scuc
