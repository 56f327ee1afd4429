#include "scuc/formulation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace scuc {

namespace {
constexpr double kPowerTol = 1e-6;
}

const char* family_name(ConstraintFamily f) {
    switch (f) {
        case ConstraintFamily::initial_status: return "initial_status";
        case ConstraintFamily::logic: return "logic";
        case ConstraintFamily::min_updown: return "min_updown";
        case ConstraintFamily::init_power: return "init_power";
        case ConstraintFamily::prod_limits: return "prod_limits";
        case ConstraintFamily::ramp: return "ramp";
        case ConstraintFamily::balance: return "balance";
        case ConstraintFamily::security: return "security";
    }
    return "?";
}

BoundaryState initial_boundary(const Instance& inst) {
    BoundaryState theta(inst.generators.size());
    for (size_t g = 0; g < inst.generators.size(); ++g) {
        const Generator& gen = inst.generators[g];
        GenBoundary& b = theta[g];
        b.on = gen.init_on;
        b.min_up_remaining = gen.init_min_up_remaining;
        b.min_down_remaining = gen.init_min_down_remaining;
        b.power = gen.init_power;
        // Seed the duration counters with the shortest history consistent with
        // the remaining requirement; undercounting only ever tightens.
        b.cum_up = gen.init_on ? std::max(0, gen.min_up - gen.init_min_up_remaining) : 0;
        b.cum_down = gen.init_on ? 0 : std::max(0, gen.min_down - gen.init_min_down_remaining);
    }
    return theta;
}

static VarLayout make_layout(const Instance& inst, int horizon_len) {
    VarLayout lay;
    lay.gens = static_cast<int>(inst.generators.size());
    lay.buses = static_cast<int>(inst.buses.size());
    lay.horizon = horizon_len;
    lay.segment_count.resize(lay.gens);
    lay.segment_base.resize(lay.gens + 1, 0);
    for (int g = 0; g < lay.gens; ++g) {
        lay.segment_count[g] = static_cast<int>(inst.generators[g].cost_segments.size());
        lay.segment_base[g + 1] = lay.segment_base[g] + lay.segment_count[g];
    }
    const int gh = lay.gens * horizon_len;
    lay.commit_off = 0;
    lay.startup_off = gh;
    lay.shutdown_off = 2 * gh;
    lay.dispatch0_off = 3 * gh;
    lay.dispatch_off = 3 * gh + lay.gens;
    lay.segment_off = lay.dispatch_off + gh;
    lay.curtail_off = lay.segment_off + lay.segment_base.back() * horizon_len;
    lay.total = lay.curtail_off + lay.buses * horizon_len;
    return lay;
}

ModelSpec build_model(const Instance& inst, int window_start, int horizon_len,
                      const BoundaryState& theta, int integer_prefix, SecurityMode security_mode,
                      const SensitivitySet* sens) {
    const int G = static_cast<int>(inst.generators.size());
    const int B = static_cast<int>(inst.buses.size());
    const int H = horizon_len;
    if (H < 1) throw InvariantError("build_model: horizon length >= 1 required");
    if (integer_prefix < 1 || integer_prefix > H)
        throw InvariantError("build_model: integer prefix must lie in [1, horizon]");
    if (window_start < 0 || window_start + H > inst.horizon)
        throw InvariantError("build_model: window exceeds the instance horizon");
    if (theta.size() != static_cast<size_t>(G))
        throw InvariantError("build_model: boundary state does not match the generator set");
    if (security_mode == SecurityMode::enumerate_all && sens == nullptr)
        throw InvariantError("build_model: enumerated security requires sensitivities");

    ModelSpec m;
    m.layout = make_layout(inst, H);
    m.window_start = window_start;
    m.integer_prefix = integer_prefix;
    m.security_enumerated = (security_mode == SecurityMode::enumerate_all);
    m.variables.resize(m.layout.total);

    auto commitment_domain = [&](int t) {
        return t <= integer_prefix ? Domain::binary : Domain::relaxed_unit;
    };
    for (int t = 1; t <= H; ++t)
        for (int g = 0; g < G; ++g) {
            m.variables[m.layout.commit(g, t)] = {{VarKind::commit, g, t, -1}, commitment_domain(t), 0.0, 1.0};
            m.variables[m.layout.startup(g, t)] = {{VarKind::startup, g, t, -1}, commitment_domain(t), 0.0, 1.0};
            m.variables[m.layout.shutdown(g, t)] = {{VarKind::shutdown, g, t, -1}, commitment_domain(t), 0.0, 1.0};
        }
    for (int g = 0; g < G; ++g) {
        double p0 = theta[g].power;
        m.variables[m.layout.dispatch0(g)] = {{VarKind::dispatch, g, 0, -1}, Domain::continuous, p0, p0};
    }
    for (int t = 1; t <= H; ++t)
        for (int g = 0; g < G; ++g)
            m.variables[m.layout.dispatch(g, t)] = {
                {VarKind::dispatch, g, t, -1}, Domain::continuous, 0.0, inst.generators[g].p_max};
    for (int t = 1; t <= H; ++t)
        for (int g = 0; g < G; ++g)
            for (int k = 0; k < m.layout.segment_count[g]; ++k)
                m.variables[m.layout.segment(g, t, k)] = {{VarKind::segment, g, t, k},
                                                          Domain::continuous,
                                                          0.0,
                                                          inst.generators[g].cost_segments[k].width};
    for (int t = 1; t <= H; ++t)
        for (int b = 0; b < B; ++b)
            m.variables[m.layout.curtail(b, t)] = {{VarKind::curtail, b, t, -1},
                                                   Domain::continuous,
                                                   0.0,
                                                   inst.demand[b][window_start + t - 1]};

    auto add = [&](ConstraintFamily fam, std::vector<LinTerm> terms, Sense sense, double rhs) {
        m.constraints.push_back({fam, std::move(terms), sense, rhs, std::nullopt});
    };

    // Initial status: commitments pinned while the boundary up/down obligation lasts.
    for (int g = 0; g < G; ++g) {
        const GenBoundary& th = theta[g];
        if (th.on && th.min_up_remaining > 0)
            for (int t = 1; t <= std::min(H, th.min_up_remaining); ++t)
                add(ConstraintFamily::initial_status, {{m.layout.commit(g, t), 1.0}}, Sense::eq, 1.0);
        if (!th.on && th.min_down_remaining > 0)
            for (int t = 1; t <= std::min(H, th.min_down_remaining); ++t)
                add(ConstraintFamily::initial_status, {{m.layout.commit(g, t), 1.0}}, Sense::eq, 0.0);
    }

    // Logic: x_t - x_{t-1} = z_t - w_t, z_t + w_t <= 1.
    for (int g = 0; g < G; ++g)
        for (int t = 1; t <= H; ++t) {
            std::vector<LinTerm> terms{{m.layout.commit(g, t), 1.0},
                                       {m.layout.startup(g, t), -1.0},
                                       {m.layout.shutdown(g, t), 1.0}};
            double rhs = 0.0;
            if (t == 1) {
                rhs = theta[g].on ? 1.0 : 0.0;
            } else {
                terms.push_back({m.layout.commit(g, t - 1), -1.0});
            }
            add(ConstraintFamily::logic, std::move(terms), Sense::eq, rhs);
            add(ConstraintFamily::logic,
                {{m.layout.startup(g, t), 1.0}, {m.layout.shutdown(g, t), 1.0}}, Sense::le, 1.0);
        }

    // Minimum up/down: rolling sums of starts (stops) bounded by the status.
    for (int g = 0; g < G; ++g) {
        const Generator& gen = inst.generators[g];
        for (int t = 1; t <= H; ++t) {
            std::vector<LinTerm> up;
            for (int tau = std::max(1, t - gen.min_up + 1); tau <= t; ++tau)
                up.push_back({m.layout.startup(g, tau), 1.0});
            up.push_back({m.layout.commit(g, t), -1.0});
            add(ConstraintFamily::min_updown, std::move(up), Sense::le, 0.0);

            std::vector<LinTerm> down;
            for (int tau = std::max(1, t - gen.min_down + 1); tau <= t; ++tau)
                down.push_back({m.layout.shutdown(g, tau), 1.0});
            down.push_back({m.layout.commit(g, t), 1.0});
            add(ConstraintFamily::min_updown, std::move(down), Sense::le, 1.0);
        }
    }

    // Initial production: the period-0 dispatch is pinned to the boundary power.
    for (int g = 0; g < G; ++g)
        add(ConstraintFamily::init_power, {{m.layout.dispatch0(g), 1.0}}, Sense::eq, theta[g].power);

    // Production limits via the segment formulation:
    // p = p_min * x + sum_k seg_k, 0 <= seg_k <= width_k * x.
    for (int g = 0; g < G; ++g) {
        const Generator& gen = inst.generators[g];
        for (int t = 1; t <= H; ++t) {
            std::vector<LinTerm> link{{m.layout.dispatch(g, t), 1.0},
                                      {m.layout.commit(g, t), -gen.p_min}};
            for (int k = 0; k < m.layout.segment_count[g]; ++k)
                link.push_back({m.layout.segment(g, t, k), -1.0});
            add(ConstraintFamily::prod_limits, std::move(link), Sense::eq, 0.0);
            for (int k = 0; k < m.layout.segment_count[g]; ++k)
                add(ConstraintFamily::prod_limits,
                    {{m.layout.segment(g, t, k), 1.0},
                     {m.layout.commit(g, t), -gen.cost_segments[k].width}},
                    Sense::le, 0.0);
        }
    }

    // Ramping with start-up/shut-down allowances.
    for (int g = 0; g < G; ++g) {
        const Generator& gen = inst.generators[g];
        for (int t = 1; t <= H; ++t) {
            int prev = (t == 1) ? m.layout.dispatch0(g) : m.layout.dispatch(g, t - 1);
            std::vector<LinTerm> up{{m.layout.dispatch(g, t), 1.0},
                                    {prev, -1.0},
                                    {m.layout.startup(g, t), -gen.startup_cap}};
            double up_rhs = 0.0;
            if (t == 1) {
                up_rhs = gen.ramp_up * (theta[g].on ? 1.0 : 0.0);
            } else {
                up.push_back({m.layout.commit(g, t - 1), -gen.ramp_up});
            }
            add(ConstraintFamily::ramp, std::move(up), Sense::le, up_rhs);

            add(ConstraintFamily::ramp,
                {{prev, 1.0},
                 {m.layout.dispatch(g, t), -1.0},
                 {m.layout.commit(g, t), -gen.ramp_down},
                 {m.layout.shutdown(g, t), -gen.shutdown_cap}},
                Sense::le, 0.0);
        }
    }

    // System balance: generation equals demand net of curtailment.
    for (int t = 1; t <= H; ++t) {
        std::vector<LinTerm> terms;
        terms.reserve(G + B);
        for (int g = 0; g < G; ++g) terms.push_back({m.layout.dispatch(g, t), 1.0});
        for (int b = 0; b < B; ++b) terms.push_back({m.layout.curtail(b, t), 1.0});
        double rhs = 0.0;
        for (int b = 0; b < B; ++b) rhs += inst.demand[b][window_start + t - 1];
        add(ConstraintFamily::balance, std::move(terms), Sense::eq, rhs);
    }

    // Line limits, both directions per (line, period, contingency-or-base).
    if (security_mode == SecurityMode::enumerate_all) {
        const int C = static_cast<int>(inst.contingencies.size());
        for (int t = 1; t <= H; ++t)
            for (int c = -1; c < C; ++c)
                for (int l = 0; l < static_cast<int>(inst.lines.size()); ++l) {
                    m.constraints.push_back(
                        security_row(inst, *sens, m, {l, t, c, FlowDirection::upper}));
                    m.constraints.push_back(
                        security_row(inst, *sens, m, {l, t, c, FlowDirection::lower}));
                }
    }

    // Objective: production (cost at minimum + marginal segments) + startup +
    // no-load + curtailment penalty.
    for (int t = 1; t <= H; ++t)
        for (int g = 0; g < G; ++g) {
            const Generator& gen = inst.generators[g];
            double xcost = gen.cost_noload + gen.cost_at_min;
            if (xcost != 0.0) m.objective.push_back({m.layout.commit(g, t), xcost});
            if (gen.cost_startup != 0.0)
                m.objective.push_back({m.layout.startup(g, t), gen.cost_startup});
            for (int k = 0; k < m.layout.segment_count[g]; ++k)
                m.objective.push_back(
                    {m.layout.segment(g, t, k), gen.cost_segments[k].marginal_cost});
        }
    if (inst.curtail_penalty != 0.0)
        for (int t = 1; t <= H; ++t)
            for (int b = 0; b < B; ++b)
                m.objective.push_back({m.layout.curtail(b, t), inst.curtail_penalty});

    return m;
}

Constraint security_row(const Instance& inst, const SensitivitySet& sens, const ModelSpec& model,
                        const SecurityCutId& id) {
    const int global_t = model.window_start + id.period;
    const Line& line = inst.lines[id.line];
    const double limit = id.contingency < 0 ? line.limit_base : line.contingency_limit();

    Constraint row;
    row.family = ConstraintFamily::security;
    row.cut = id;

    bool outaged_self =
        id.contingency >= 0 && inst.contingency_line_index[id.contingency] == id.line;
    double shift = 0.0;
    if (!outaged_self) {
        Eigen::VectorXd ptdf_row =
            id.contingency < 0 ? Eigen::VectorXd(sens.ptdf_base().row(id.line).transpose())
                               : sens.contingency_ptdf_row(id.line, id.contingency);
        for (int b = 0; b < sens.bus_count(); ++b) {
            double coef = ptdf_row(b);
            if (std::abs(coef) < 1e-12) continue;
            for (int g : inst.gens_at_bus[b])
                row.terms.push_back({model.layout.dispatch(g, id.period), coef});
            row.terms.push_back({model.layout.curtail(b, id.period), coef});
            shift += coef * inst.demand[b][global_t - 1];
        }
    }
    if (id.direction == FlowDirection::upper) {
        row.sense = Sense::le;
        row.rhs = limit + shift;
    } else {
        row.sense = Sense::ge;
        row.rhs = -limit + shift;
    }
    return row;
}

double production_cost(const Generator& gen, int commit, double power) {
    if (commit == 0) {
        if (std::abs(power) > kPowerTol)
            throw InvariantError("production_cost: power must be 0 when not committed");
        return 0.0;
    }
    if (power < gen.p_min - kPowerTol || power > gen.p_max + kPowerTol)
        throw InvariantError("production_cost: power outside [p_min, p_max] for generator " + gen.id);
    double cost = gen.cost_at_min;
    double rem = std::max(0.0, power - gen.p_min);
    for (const CostSegment& s : gen.cost_segments) {
        double take = std::min(rem, s.width);
        cost += take * s.marginal_cost;
        rem -= take;
        if (rem <= 0.0) break;
    }
    return cost;
}

ObjectiveBreakdown objective_breakdown(const Instance& inst, const Schedule& sched) {
    const size_t G = inst.generators.size();
    const size_t B = inst.buses.size();
    if (sched.horizon != inst.horizon || sched.x.size() != G || sched.p.size() != G ||
        sched.curtail.size() != B)
        throw InvariantError("objective: schedule dimensions do not match the instance");

    ObjectiveBreakdown out;
    for (size_t g = 0; g < G; ++g) {
        const Generator& gen = inst.generators[g];
        for (int t = 0; t < inst.horizon; ++t) {
            out.production += production_cost(gen, sched.x[g][t], sched.p[g][t]);
            out.startup += gen.cost_startup * sched.z[g][t];
            out.noload += gen.cost_noload * sched.x[g][t];
        }
    }
    for (size_t b = 0; b < B; ++b)
        for (int t = 0; t < inst.horizon; ++t)
            out.curtailment += inst.curtail_penalty * sched.curtail[b][t];
    return out;
}

double objective_value(const Instance& inst, const Schedule& sched) {
    return objective_breakdown(inst, sched).total();
}

std::string ModelSpec::variable_name(int var) const {
    const VariableDef& v = variables[var];
    std::ostringstream os;
    switch (v.id.kind) {
        case VarKind::commit: os << "x[" << v.id.unit << ',' << v.id.period << ']'; break;
        case VarKind::startup: os << "z[" << v.id.unit << ',' << v.id.period << ']'; break;
        case VarKind::shutdown: os << "w[" << v.id.unit << ',' << v.id.period << ']'; break;
        case VarKind::dispatch: os << "p[" << v.id.unit << ',' << v.id.period << ']'; break;
        case VarKind::segment:
            os << "seg[" << v.id.unit << ',' << v.id.period << ',' << v.id.segment << ']';
            break;
        case VarKind::curtail: os << "cur[" << v.id.unit << ',' << v.id.period << ']'; break;
    }
    return os.str();
}

std::string dump_model_lp(const ModelSpec& m) {
    std::ostringstream os;
    os << "minimize\n ";
    for (size_t i = 0; i < m.objective.size(); ++i) {
        const auto& term = m.objective[i];
        if (i) os << (term.coef >= 0 ? " + " : " - ");
        else if (term.coef < 0) os << "- ";
        os << std::abs(term.coef) << ' ' << m.variable_name(term.var);
    }
    os << "\nsubject to\n";
    int counter = 0;
    for (const Constraint& c : m.constraints) {
        if (c.cut) {
            const SecurityCutId& id = *c.cut;
            os << (id.direction == FlowDirection::upper ? " flow_ub[" : " flow_lb[") << id.line
               << ',' << id.period << ',' << (id.contingency < 0 ? std::string("base")
                                                                 : std::to_string(id.contingency))
               << "]: ";
        } else {
            os << ' ' << family_name(c.family) << '[' << counter << "]: ";
        }
        ++counter;
        for (size_t i = 0; i < c.terms.size(); ++i) {
            const auto& term = c.terms[i];
            if (i) os << (term.coef >= 0 ? " + " : " - ");
            else if (term.coef < 0) os << "- ";
            os << std::abs(term.coef) << ' ' << m.variable_name(term.var);
        }
        if (c.terms.empty()) os << "0";
        os << (c.sense == Sense::le ? " <= " : c.sense == Sense::eq ? " = " : " >= ") << c.rhs
           << '\n';
    }
    os << "bounds\n";
    for (size_t j = 0; j < m.variables.size(); ++j)
        os << ' ' << m.variables[j].lo << " <= " << m.variable_name(static_cast<int>(j))
           << " <= " << m.variables[j].hi << '\n';
    os << "binaries\n";
    for (size_t j = 0; j < m.variables.size(); ++j)
        if (m.variables[j].domain == Domain::binary)
            os << ' ' << m.variable_name(static_cast<int>(j)) << '\n';
    os << "end\n";
    return os.str();
}

}  // namespace scuc
