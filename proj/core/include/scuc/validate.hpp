#pragma once

#include <string>
#include <vector>

#include "scuc/instance.hpp"
#include "scuc/model.hpp"
#include "scuc/network.hpp"
#include "scuc/schedule.hpp"

namespace scuc {

struct ValidationTolerances {
    double binary = 1e-6;    // distance of x/z/w from {0,1}
    double logic = 1e-6;     // absolute, logic and min up/down rows
    double mw = 1e-4;        // absolute MW, balance/ramp/limits
    double flow_rel = 1e-4;  // relative, flow vs line limit
};

struct ConstraintViolation {
    ConstraintFamily family;
    std::string location;  // generator/bus/line id
    int period = 0;        // 1-based; 0 when not period-specific
    int contingency = -2;  // -1 base case, -2 not applicable
    double magnitude = 0.0;
    std::string detail;
};

struct ValidationReport {
    std::vector<ConstraintViolation> violations;

    bool feasible() const { return violations.empty(); }
    std::string to_json() const;
};

/// Full-constraint feasibility oracle: recomputes every constraint residual
/// from raw instance data and flows from the SensitivitySet, enumerating all
/// security rows (no lazy shortcut). Never consults solver artifacts.
ValidationReport check_schedule(const Instance& instance, const SensitivitySet& sens,
                                const Schedule& schedule,
                                const ValidationTolerances& tol = {});

/// Relative gap (objective - reference) / reference. Throws on reference <= 0.
double gap_report(double objective, double reference);

}  // namespace scuc
