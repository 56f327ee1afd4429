#include "scuc/validate.hpp"

#include <cmath>

#include "json.hpp"

namespace scuc {

namespace {

bool near_binary(double v, double tol) {
    return std::abs(v) <= tol || std::abs(v - 1.0) <= tol;
}

}  // namespace

ValidationReport check_schedule(const Instance& inst, const SensitivitySet& sens,
                                const Schedule& sched, const ValidationTolerances& tol) {
    const int G = static_cast<int>(inst.generators.size());
    const int B = static_cast<int>(inst.buses.size());
    const int T = inst.horizon;
    if (sched.horizon != T || static_cast<int>(sched.x.size()) != G ||
        static_cast<int>(sched.p.size()) != G || static_cast<int>(sched.curtail.size()) != B)
        throw InvariantError("check_schedule: schedule dimensions do not match the instance");

    ValidationReport report;
    auto flag = [&](ConstraintFamily fam, std::string loc, int t, int c, double mag,
                    std::string detail) {
        report.violations.push_back({fam, std::move(loc), t, c, mag, std::move(detail)});
    };

    for (int g = 0; g < G; ++g) {
        const Generator& gen = inst.generators[g];
        const auto& x = sched.x[g];
        const auto& z = sched.z[g];
        const auto& w = sched.w[g];
        const auto& p = sched.p[g];

        for (int t = 0; t < T; ++t) {
            if (!near_binary(x[t], tol.binary) || !near_binary(z[t], tol.binary) ||
                !near_binary(w[t], tol.binary))
                flag(ConstraintFamily::logic, gen.id, t + 1, -2,
                     std::max({std::abs(x[t] - std::round(double(x[t]))),
                               std::abs(z[t] - std::round(double(z[t]))),
                               std::abs(w[t] - std::round(double(w[t])))}),
                     "commitment flags must be 0/1");
        }

        // Initial-status pinning from the instance boundary.
        if (gen.init_on)
            for (int t = 0; t < std::min(T, gen.init_min_up_remaining); ++t) {
                if (x[t] != 1)
                    flag(ConstraintFamily::initial_status, gen.id, t + 1, -2, 1.0,
                         "unit must stay on through its initial up-time");
            }
        else
            for (int t = 0; t < std::min(T, gen.init_min_down_remaining); ++t) {
                if (x[t] != 0)
                    flag(ConstraintFamily::initial_status, gen.id, t + 1, -2, 1.0,
                         "unit must stay off through its initial down-time");
            }

        // Logic identity and exclusivity.
        for (int t = 0; t < T; ++t) {
            double xprev = t == 0 ? (gen.init_on ? 1.0 : 0.0) : double(x[t - 1]);
            double resid = double(x[t]) - xprev - double(z[t]) + double(w[t]);
            if (std::abs(resid) > tol.logic)
                flag(ConstraintFamily::logic, gen.id, t + 1, -2, std::abs(resid),
                     "x_t - x_{t-1} != z_t - w_t");
            if (double(z[t]) + double(w[t]) > 1.0 + tol.logic)
                flag(ConstraintFamily::logic, gen.id, t + 1, -2, z[t] + w[t] - 1.0,
                     "simultaneous start-up and shut-down");
        }

        // Minimum up/down rolling sums.
        for (int t = 0; t < T; ++t) {
            double zsum = 0.0, wsum = 0.0;
            for (int tau = std::max(0, t - gen.min_up + 1); tau <= t; ++tau) zsum += z[tau];
            for (int tau = std::max(0, t - gen.min_down + 1); tau <= t; ++tau) wsum += w[tau];
            if (zsum > double(x[t]) + tol.logic)
                flag(ConstraintFamily::min_updown, gen.id, t + 1, -2, zsum - x[t],
                     "start within the minimum up-time of an off period");
            if (wsum > 1.0 - double(x[t]) + tol.logic)
                flag(ConstraintFamily::min_updown, gen.id, t + 1, -2, wsum - (1.0 - x[t]),
                     "stop within the minimum down-time of an on period");
        }

        // Production limits.
        for (int t = 0; t < T; ++t) {
            double lo = gen.p_min * x[t], hi = gen.p_max * x[t];
            if (p[t] < lo - tol.mw)
                flag(ConstraintFamily::prod_limits, gen.id, t + 1, -2, lo - p[t],
                     "output below minimum stable level");
            if (p[t] > hi + tol.mw)
                flag(ConstraintFamily::prod_limits, gen.id, t + 1, -2, p[t] - hi,
                     "output above capacity");
        }

        // Ramping, including the boundary period against the initial power.
        for (int t = 0; t < T; ++t) {
            double pprev = t == 0 ? gen.init_power : p[t - 1];
            double xprev = t == 0 ? (gen.init_on ? 1.0 : 0.0) : double(x[t - 1]);
            double up = p[t] - pprev - gen.ramp_up * xprev - gen.startup_cap * z[t];
            if (up > tol.mw)
                flag(ConstraintFamily::ramp, gen.id, t + 1, -2, up, "ramp-up limit exceeded");
            double down = pprev - p[t] - gen.ramp_down * x[t] - gen.shutdown_cap * w[t];
            if (down > tol.mw)
                flag(ConstraintFamily::ramp, gen.id, t + 1, -2, down, "ramp-down limit exceeded");
        }
    }

    // Balance and curtailment bounds.
    for (int t = 0; t < T; ++t) {
        double gen_sum = 0.0, curtail_sum = 0.0, demand_sum = 0.0;
        for (int g = 0; g < G; ++g) gen_sum += sched.p[g][t];
        for (int b = 0; b < B; ++b) {
            double c = sched.curtail[b][t];
            double d = inst.demand[b][t];
            curtail_sum += c;
            demand_sum += d;
            if (c < -tol.mw)
                flag(ConstraintFamily::balance, inst.buses[b], t + 1, -2, -c,
                     "negative curtailment");
            if (c > d + tol.mw)
                flag(ConstraintFamily::balance, inst.buses[b], t + 1, -2, c - d,
                     "curtailment above demand");
        }
        double resid = gen_sum + curtail_sum - demand_sum;
        if (std::abs(resid) > tol.mw)
            flag(ConstraintFamily::balance, "system", t + 1, -2, std::abs(resid),
                 "generation does not match net demand");
    }

    // Security: every line, period and contingency by full enumeration.
    const int L = static_cast<int>(inst.lines.size());
    const int C = static_cast<int>(inst.contingencies.size());
    for (int t = 0; t < T; ++t) {
        Eigen::VectorXd inj = Eigen::VectorXd::Zero(B);
        for (int b = 0; b < B; ++b) inj(b) = sched.curtail[b][t] - inst.demand[b][t];
        for (int g = 0; g < G; ++g)
            inj(inst.bus_index.at(inst.generators[g].bus)) += sched.p[g][t];
        double imbalance = inj.sum();
        inj(sens.reference_bus()) -= imbalance;  // residual balance noise lands on the slack bus

        for (int c = -1; c < C; ++c) {
            Eigen::VectorXd flows = sens.line_flows(inj, c);
            int outaged = c < 0 ? -1 : inst.contingency_line_index[c];
            for (int l = 0; l < L; ++l) {
                if (l == outaged) continue;
                double fmax = c < 0 ? inst.lines[l].limit_base : inst.lines[l].contingency_limit();
                double excess = std::abs(flows(l)) - fmax;
                if (excess > tol.flow_rel * fmax)
                    flag(ConstraintFamily::security, inst.lines[l].id, t + 1, c, excess,
                         "line flow beyond limit");
            }
        }
    }

    return report;
}

std::string ValidationReport::to_json() const {
    nlohmann::json j;
    j["feasible"] = feasible();
    j["violation_count"] = violations.size();
    nlohmann::json rows = nlohmann::json::array();
    for (const ConstraintViolation& v : violations) {
        nlohmann::json row = {{"family", family_name(v.family)},
                              {"location", v.location},
                              {"magnitude", v.magnitude},
                              {"detail", v.detail}};
        if (v.period > 0) row["period"] = v.period;
        if (v.contingency >= -1)
            row["contingency"] = v.contingency < 0 ? "base" : std::to_string(v.contingency);
        rows.push_back(std::move(row));
    }
    j["violations"] = std::move(rows);
    return j.dump(2) + "\n";
}

double gap_report(double objective, double reference) {
    if (!(reference > 0.0))
        throw InvariantError("gap_report: reference objective must be positive");
    return (objective - reference) / reference;
}

}  // namespace scuc
