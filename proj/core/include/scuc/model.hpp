#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace scuc {

enum class VarKind : uint8_t { commit, startup, shutdown, dispatch, segment, curtail };

/// Structured variable identity: (kind, generator-or-bus index, period,
/// optional segment index). Periods are 1-based within the model's horizon;
/// dispatch additionally has a pinned period-0 slot for the initial power.
struct VarId {
    VarKind kind;
    int unit;     // generator index for commit/startup/shutdown/dispatch/segment, bus index for curtail
    int period;   // 0..H (0 only for the pinned initial dispatch)
    int segment;  // segment index for kind==segment, else -1

    bool operator==(const VarId&) const = default;
};

enum class Domain : uint8_t { binary, relaxed_unit, continuous };

struct VariableDef {
    VarId id;
    Domain domain;
    double lo;
    double hi;
};

struct LinTerm {
    int var;
    double coef;
};

enum class Sense : uint8_t { le, eq, ge };

enum class ConstraintFamily : uint8_t {
    initial_status,
    logic,
    min_updown,
    init_power,
    prod_limits,
    ramp,
    balance,
    security,
};

const char* family_name(ConstraintFamily f);

enum class FlowDirection : uint8_t { upper, lower };

/// Identity of one security row: a line-limit bound for (line, period,
/// contingency-or-base, direction). Unique key within a cut pool.
struct SecurityCutId {
    int line;
    int period;       // model-local period, 1-based
    int contingency;  // -1 for the base case
    FlowDirection direction;

    bool operator==(const SecurityCutId&) const = default;
    bool operator<(const SecurityCutId& o) const {
        if (period != o.period) return period < o.period;
        if (contingency != o.contingency) return contingency < o.contingency;
        if (line != o.line) return line < o.line;
        return direction < o.direction;
    }
    long long key() const {
        return ((static_cast<long long>(period) * 1048576 + (contingency + 1)) * 1048576 + line) * 2 +
               (direction == FlowDirection::lower ? 1 : 0);
    }
};

struct Constraint {
    ConstraintFamily family;
    std::vector<LinTerm> terms;
    Sense sense;
    double rhs;
    std::optional<SecurityCutId> cut;  // set for security rows
};

/// Deterministic dense layout of the UC variable space for one model.
struct VarLayout {
    int gens = 0;
    int buses = 0;
    int horizon = 0;                 // H, model-local periods 1..H
    std::vector<int> segment_count;  // per generator
    std::vector<int> segment_base;   // prefix offsets into the segment block
    int commit_off = 0, startup_off = 0, shutdown_off = 0;
    int dispatch0_off = 0, dispatch_off = 0, segment_off = 0, curtail_off = 0;
    int total = 0;

    int commit(int g, int t) const { return commit_off + (t - 1) * gens + g; }
    int startup(int g, int t) const { return startup_off + (t - 1) * gens + g; }
    int shutdown(int g, int t) const { return shutdown_off + (t - 1) * gens + g; }
    int dispatch0(int g) const { return dispatch0_off + g; }
    int dispatch(int g, int t) const { return dispatch_off + (t - 1) * gens + g; }
    int segment(int g, int t, int k) const {
        return segment_off + (t - 1) * segment_base.back() + segment_base[g] + k;
    }
    int curtail(int b, int t) const { return curtail_off + (t - 1) * buses + b; }
};

/// Solver-agnostic MILP description. Every variable referenced by a
/// constraint exists; security rows carry their SecurityCutId.
struct ModelSpec {
    std::vector<VariableDef> variables;
    std::vector<Constraint> constraints;
    std::vector<LinTerm> objective;
    double objective_constant = 0.0;

    VarLayout layout;
    int window_start = 0;    // global period preceding model-local period 1
    int integer_prefix = 0;  // s_I: commitment vars binary for t <= s_I
    bool security_enumerated = false;

    std::string variable_name(int var) const;
};

}  // namespace scuc
