#pragma once

#include <string>
#include <unordered_set>
#include <vector>

#include "scuc/formulation.hpp"
#include "scuc/instance.hpp"
#include "scuc/milp.hpp"
#include "scuc/model.hpp"
#include "scuc/network.hpp"

namespace scuc {

/// Relative violation threshold on |flow| against the line limit.
constexpr double kViolationTol = 1e-5;

struct Violation {
    SecurityCutId id;
    double flow;   // MW at the screened point
    double limit;  // MW
    double normalized_excess;  // (|flow| - limit) / limit
};

/// Dispatch and curtailment values over a (sub)window, model-local period
/// t = 1..len mapping to global period window_start + t.
struct WindowValues {
    int window_start = 0;
    int len = 0;
    std::vector<std::vector<double>> p;        // [g][t-1]
    std::vector<std::vector<double>> curtail;  // [b][t-1]
};

WindowValues window_values_from(const ModelSpec& model, const std::vector<double>& assignment);

struct ScreenResult {
    std::vector<Violation> violations;  // sorted by excess desc, ties (t,c,l,dir)
    long flow_evaluations = 0;          // exactly |L| * (1 + |C|) * len
};

/// Screens every (line, period, contingency, direction) for limit violations
/// beyond kViolationTol. Parallelizes across (contingency, period) blocks;
/// the merged, sorted result is a pure function of the inputs regardless of
/// thread count. Throws on per-period power imbalance beyond 1e-6 MW.
ScreenResult screen(const Instance& instance, const SensitivitySet& sens,
                    const WindowValues& values, int threads = 1);

struct PooledCut {
    SecurityCutId id;
    double flow;   // at separation time
    double limit;
};

/// Cut pool: unique SecurityCutIds in insertion order.
class CutPool {
public:
    bool contains(const SecurityCutId& id) const { return keys_.count(id.key()) > 0; }
    void insert(const PooledCut& cut);
    size_t size() const { return cuts_.size(); }
    const std::vector<PooledCut>& entries() const { return cuts_; }

private:
    std::vector<PooledCut> cuts_;
    std::unordered_set<long long> keys_;
};

/// Picks the most violated candidates, up to cap_per_period per period,
/// skipping ids already pooled. Never returns empty for a non-empty input:
/// if everything is pooled already, the single most violated id is re-emitted
/// with a diagnostic.
std::vector<SecurityCutId> select_cuts(const std::vector<Violation>& violations,
                                       int cap_per_period, const CutPool& pool);

struct SecureSolveResult {
    SolveOutcome outcome;
    CutPool pool;
    int filter_iterations = 0;  // outer loop count for the filtering baseline
    ModelSpec model;            // the model solve_secure built (for layout reuse)
};

/// Branch-and-cut with dynamic separation: security rows start absent and are
/// injected from the integer-solution callback; any returned incumbent is
/// violation-free over the full line/period/contingency set.
SecureSolveResult solve_with_dynamic_cuts(const ModelSpec& lazy_model, const SensitivitySet& sens,
                                          const Instance& instance, const SolveControls& controls,
                                          int cut_cap_per_period = 15);

/// Iterative transmission filtering baseline: solve the MILP from scratch on
/// the current cut set, screen the incumbent, add the most violated rows,
/// repeat until clean. Throws after iteration_cap rounds.
SecureSolveResult solve_with_filtering(const ModelSpec& lazy_model, const SensitivitySet& sens,
                                       const Instance& instance, const SolveControls& controls,
                                       int cut_cap_per_period = 15, int iteration_cap = 50);

enum class SeparationMode { dynamic, filtering, enumerate_all };

const char* separation_name(SeparationMode m);

/// Unified entry: builds the model for the window and enforces security per
/// the requested mode (dynamic cuts, filtering loop, or full enumeration).
SecureSolveResult solve_secure(const Instance& instance, const SensitivitySet& sens,
                               int window_start, int horizon_len, const BoundaryState& theta,
                               int integer_prefix, SeparationMode mode,
                               const SolveControls& controls, int cut_cap_per_period = 15);

/// Cut-pool dump: CSV (line, period, contingency, direction, flow, limit);
/// periods are global.
std::string dump_cut_pool_csv(const Instance& instance, const CutPool& pool, int window_start);

}  // namespace scuc
