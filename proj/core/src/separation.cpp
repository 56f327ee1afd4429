#include "scuc/separation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include "scuc/errors.hpp"
#include "scuc/log.hpp"

namespace scuc {

namespace {

constexpr double kBalanceTol = 1e-6;

int worker_count(int threads) {
    if (threads > 0) return threads;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Static round-robin block assignment; each worker writes only its own blocks,
// so the merged result is independent of scheduling.
template <typename Fn>
void run_blocks(int nblocks, int threads, Fn&& fn) {
    int nw = std::min(worker_count(threads), std::max(1, nblocks));
    if (nw <= 1) {
        for (int i = 0; i < nblocks; ++i) fn(i);
        return;
    }
    std::vector<std::thread> workers;
    workers.reserve(nw);
    for (int w = 0; w < nw; ++w)
        workers.emplace_back([&, w] {
            for (int i = w; i < nblocks; i += nw) fn(i);
        });
    for (auto& t : workers) t.join();
}

bool violation_order(const Violation& a, const Violation& b) {
    if (a.normalized_excess != b.normalized_excess) return a.normalized_excess > b.normalized_excess;
    return a.id < b.id;
}

}  // namespace

const char* separation_name(SeparationMode m) {
    switch (m) {
        case SeparationMode::dynamic: return "dynamic";
        case SeparationMode::filtering: return "filtering";
        case SeparationMode::enumerate_all: return "enumerate";
    }
    return "?";
}

WindowValues window_values_from(const ModelSpec& model, const std::vector<double>& assignment) {
    const VarLayout& lay = model.layout;
    WindowValues v;
    v.window_start = model.window_start;
    v.len = lay.horizon;
    v.p.assign(lay.gens, std::vector<double>(lay.horizon, 0.0));
    v.curtail.assign(lay.buses, std::vector<double>(lay.horizon, 0.0));
    for (int t = 1; t <= lay.horizon; ++t) {
        for (int g = 0; g < lay.gens; ++g) v.p[g][t - 1] = assignment[lay.dispatch(g, t)];
        for (int b = 0; b < lay.buses; ++b) v.curtail[b][t - 1] = assignment[lay.curtail(b, t)];
    }
    return v;
}

ScreenResult screen(const Instance& inst, const SensitivitySet& sens, const WindowValues& values,
                    int threads) {
    const int L = static_cast<int>(inst.lines.size());
    const int B = static_cast<int>(inst.buses.size());
    const int G = static_cast<int>(inst.generators.size());
    const int C = static_cast<int>(inst.contingencies.size());
    const int H = values.len;

    // Net injections per period; reject unbalanced points up front.
    std::vector<Eigen::VectorXd> injections(H, Eigen::VectorXd::Zero(B));
    for (int t = 0; t < H; ++t) {
        Eigen::VectorXd& inj = injections[t];
        for (int b = 0; b < B; ++b)
            inj(b) = values.curtail[b][t] - inst.demand[b][values.window_start + t];
        for (int g = 0; g < G; ++g) inj(inst.bus_index.at(inst.generators[g].bus)) += values.p[g][t];
        double imbalance = inj.sum();
        if (std::abs(imbalance) > kBalanceTol)
            throw SolverError("screen: period " + std::to_string(values.window_start + t + 1) +
                              " unbalanced by " + std::to_string(imbalance) + " MW");
    }

    // Base flows per period, needed by every contingency block.
    std::vector<Eigen::VectorXd> base_flows(H);
    std::vector<std::vector<Violation>> block_out(H * (1 + C));
    std::vector<long> block_evals(H * (1 + C), 0);

    run_blocks(H, threads, [&](int t) {
        base_flows[t] = sens.ptdf_base() * injections[t];
        block_evals[t] = L;
        std::vector<Violation>& out = block_out[t];
        for (int l = 0; l < L; ++l) {
            double f = base_flows[t](l);
            double fmax = inst.lines[l].limit_base;
            double excess = (std::abs(f) - fmax) / fmax;
            if (excess > kViolationTol)
                out.push_back({{l, t + 1, -1,
                                f > 0 ? FlowDirection::upper : FlowDirection::lower},
                               f, fmax, excess});
        }
    });

    run_blocks(H * C, threads, [&](int block) {
        int c = block / H;
        int t = block % H;
        int k = inst.contingency_line_index[c];
        const Eigen::VectorXd& lodf = sens.lodf(c);
        double fk = base_flows[t](k);
        std::vector<Violation>& out = block_out[H + static_cast<size_t>(c) * H + t];
        block_evals[H + static_cast<size_t>(c) * H + t] = L;
        for (int l = 0; l < L; ++l) {
            if (l == k) continue;  // the outaged line carries no flow
            double f = base_flows[t](l) + lodf(l) * fk;
            double fmax = inst.lines[l].contingency_limit();
            double excess = (std::abs(f) - fmax) / fmax;
            if (excess > kViolationTol)
                out.push_back({{l, t + 1, c,
                                f > 0 ? FlowDirection::upper : FlowDirection::lower},
                               f, fmax, excess});
        }
    });

    ScreenResult result;
    for (long e : block_evals) result.flow_evaluations += e;
    for (const auto& blk : block_out)
        result.violations.insert(result.violations.end(), blk.begin(), blk.end());
    std::sort(result.violations.begin(), result.violations.end(), violation_order);
    return result;
}

void CutPool::insert(const PooledCut& cut) {
    if (keys_.insert(cut.id.key()).second) cuts_.push_back(cut);
}

std::vector<SecurityCutId> select_cuts(const std::vector<Violation>& violations,
                                       int cap_per_period, const CutPool& pool) {
    std::vector<SecurityCutId> picked;
    std::unordered_map<int, int> per_period;
    for (const Violation& v : violations) {
        if (pool.contains(v.id)) continue;
        int& count = per_period[v.id.period];
        if (count >= cap_per_period) continue;
        ++count;
        picked.push_back(v.id);
    }
    if (picked.empty() && !violations.empty()) {
        const Violation& top = violations.front();
        log::warn("select_cuts: all violated rows already pooled; re-emitting most violated "
                  "(line=", top.id.line, " t=", top.id.period, " c=", top.id.contingency,
                  " excess=", top.normalized_excess, "); consider tightening tolerances");
        picked.push_back(top.id);
    }
    return picked;
}

SecureSolveResult solve_with_dynamic_cuts(const ModelSpec& lazy_model, const SensitivitySet& sens,
                                          const Instance& inst, const SolveControls& controls,
                                          int cut_cap_per_period) {
    if (lazy_model.security_enumerated)
        throw SolverError("solve_with_dynamic_cuts requires a lazily built model");
    SecureSolveResult result;
    CutPool& pool = result.pool;

    CutCallback callback = [&](const std::vector<double>& assignment) {
        WindowValues vals = window_values_from(lazy_model, assignment);
        ScreenResult sr = screen(inst, sens, vals, controls.threads);
        std::vector<SecurityCutId> picked = select_cuts(sr.violations, cut_cap_per_period, pool);
        std::vector<LpRowDef> rows;
        rows.reserve(picked.size());
        for (const SecurityCutId& id : picked) {
            if (!pool.contains(id)) {
                auto it = std::find_if(sr.violations.begin(), sr.violations.end(),
                                       [&](const Violation& v) { return v.id == id; });
                pool.insert({id, it != sr.violations.end() ? it->flow : 0.0,
                             it != sr.violations.end() ? it->limit : 0.0});
            }
            Constraint c = security_row(inst, sens, lazy_model, id);
            rows.push_back({std::move(c.terms), c.sense, c.rhs});
        }
        return rows;
    };

    result.outcome = solve_milp(lazy_model, controls, callback);

    if (result.outcome.incumbent) {
        // The callback contract already guarantees a clean incumbent; verify.
        WindowValues vals = window_values_from(lazy_model, *result.outcome.incumbent);
        ScreenResult sr = screen(inst, sens, vals, controls.threads);
        if (!sr.violations.empty())
            throw SolverError("dynamic-cut incumbent violates " +
                              std::to_string(sr.violations.size()) + " security rows");
    }
    return result;
}

SecureSolveResult solve_with_filtering(const ModelSpec& lazy_model, const SensitivitySet& sens,
                                       const Instance& inst, const SolveControls& controls,
                                       int cut_cap_per_period, int iteration_cap) {
    if (lazy_model.security_enumerated)
        throw SolverError("solve_with_filtering requires a lazily built model");
    SecureSolveResult result;
    CutPool& pool = result.pool;

    ModelSpec working = lazy_model;
    for (int iter = 1; iter <= iteration_cap; ++iter) {
        result.filter_iterations = iter;
        result.outcome = solve_milp(working, controls);
        if (!result.outcome.incumbent) return result;

        WindowValues vals = window_values_from(working, *result.outcome.incumbent);
        ScreenResult sr = screen(inst, sens, vals, controls.threads);
        if (sr.violations.empty()) return result;

        std::vector<SecurityCutId> picked = select_cuts(sr.violations, cut_cap_per_period, pool);
        for (const SecurityCutId& id : picked) {
            if (!pool.contains(id)) {
                auto it = std::find_if(sr.violations.begin(), sr.violations.end(),
                                       [&](const Violation& v) { return v.id == id; });
                pool.insert({id, it != sr.violations.end() ? it->flow : 0.0,
                             it != sr.violations.end() ? it->limit : 0.0});
            }
            working.constraints.push_back(security_row(inst, sens, working, id));
        }
        log::debug("filtering: iteration ", iter, " added ", picked.size(), " cuts (pool ",
                   pool.size(), ")");
    }
    throw SolverError("filtering: iteration cap (" + std::to_string(iteration_cap) +
                      ") exceeded; last incumbent objective " +
                      std::to_string(result.outcome.objective));
}

SecureSolveResult solve_secure(const Instance& inst, const SensitivitySet& sens, int window_start,
                               int horizon_len, const BoundaryState& theta, int integer_prefix,
                               SeparationMode mode, const SolveControls& controls,
                               int cut_cap_per_period) {
    if (mode == SeparationMode::enumerate_all) {
        ModelSpec model = build_model(inst, window_start, horizon_len, theta, integer_prefix,
                                      SecurityMode::enumerate_all, &sens);
        SecureSolveResult result;
        result.outcome = solve_milp(model, controls);
        result.model = std::move(model);
        return result;
    }
    ModelSpec model =
        build_model(inst, window_start, horizon_len, theta, integer_prefix, SecurityMode::lazy);
    SecureSolveResult result =
        mode == SeparationMode::dynamic
            ? solve_with_dynamic_cuts(model, sens, inst, controls, cut_cap_per_period)
            : solve_with_filtering(model, sens, inst, controls, cut_cap_per_period);
    result.model = std::move(model);
    return result;
}

std::string dump_cut_pool_csv(const Instance& inst, const CutPool& pool, int window_start) {
    std::ostringstream os;
    os << "line,period,contingency,direction,flow,limit\n";
    for (const PooledCut& c : pool.entries()) {
        os << inst.lines[c.id.line].id << ',' << window_start + c.id.period << ','
           << (c.id.contingency < 0 ? std::string("base") : inst.contingencies[c.id.contingency].id)
           << ',' << (c.id.direction == FlowDirection::upper ? "upper" : "lower") << ',' << c.flow
           << ',' << c.limit << '\n';
    }
    return os.str();
}

}  // namespace scuc
