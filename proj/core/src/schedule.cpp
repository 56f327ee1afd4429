#include "scuc/schedule.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace scuc {

using nlohmann::json;

std::string PeriodProvenance::to_string() const {
    switch (kind) {
        case Kind::monolithic: return "monolithic";
        case Kind::fixed_at_iteration: return "fixed-at-iteration-" + std::to_string(index);
        case Kind::final_completion: return "final-completion";
        case Kind::rins_pass: return "rins-pass-" + std::to_string(index);
    }
    return "?";
}

Schedule Schedule::zeros(const Instance& inst) {
    Schedule s;
    s.horizon = inst.horizon;
    const size_t G = inst.generators.size();
    const size_t B = inst.buses.size();
    s.x.assign(G, std::vector<uint8_t>(inst.horizon, 0));
    s.z.assign(G, std::vector<uint8_t>(inst.horizon, 0));
    s.w.assign(G, std::vector<uint8_t>(inst.horizon, 0));
    s.p.assign(G, std::vector<double>(inst.horizon, 0.0));
    s.curtail.assign(B, std::vector<double>(inst.horizon, 0.0));
    s.provenance.assign(inst.horizon, {});
    return s;
}

void recompute_transitions(Schedule& sched, const Instance& inst) {
    for (size_t g = 0; g < inst.generators.size(); ++g) {
        uint8_t prev = inst.generators[g].init_on ? 1 : 0;
        for (int t = 0; t < sched.horizon; ++t) {
            uint8_t cur = sched.x[g][t];
            sched.z[g][t] = (cur == 1 && prev == 0) ? 1 : 0;
            sched.w[g][t] = (cur == 0 && prev == 1) ? 1 : 0;
            prev = cur;
        }
    }
}

std::string serialize_schedule(const Schedule& sched, const Instance& inst) {
    json j;
    j["meta"] = {{"instance", inst.name}, {"horizon", sched.horizon}};
    j["objective"] = {{"total", sched.objective},
                      {"production", sched.breakdown.production},
                      {"startup", sched.breakdown.startup},
                      {"noload", sched.breakdown.noload},
                      {"curtailment", sched.breakdown.curtailment}};
    json gens = json::object();
    for (size_t g = 0; g < inst.generators.size(); ++g) {
        json x = json::array(), p = json::array();
        for (int t = 0; t < sched.horizon; ++t) {
            x.push_back(static_cast<int>(sched.x[g][t]));
            p.push_back(sched.p[g][t]);
        }
        gens[inst.generators[g].id] = {{"x", std::move(x)}, {"p", std::move(p)}};
    }
    j["generators"] = std::move(gens);
    json curtail = json::object();
    for (size_t b = 0; b < inst.buses.size(); ++b) {
        json row = json::array();
        for (int t = 0; t < sched.horizon; ++t) row.push_back(sched.curtail[b][t]);
        curtail[inst.buses[b]] = std::move(row);
    }
    j["curtailment"] = std::move(curtail);
    json prov = json::array();
    for (const PeriodProvenance& pp : sched.provenance) prov.push_back(pp.to_string());
    j["provenance"] = std::move(prov);
    return j.dump(2) + "\n";
}

Schedule parse_schedule(const std::string& document, const Instance& inst) {
    json j;
    try {
        j = json::parse(document);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("schedule syntax error: ") + e.what());
    }
    Schedule s = Schedule::zeros(inst);
    if (!j.contains("meta") || !j["meta"].contains("horizon"))
        throw ParseError("schedule: missing field meta.horizon");
    int horizon = j["meta"]["horizon"].get<int>();
    if (horizon != inst.horizon)
        throw InvariantError("schedule horizon " + std::to_string(horizon) +
                             " does not match instance horizon " + std::to_string(inst.horizon));
    if (!j.contains("generators")) throw ParseError("schedule: missing field generators");
    for (auto it = j["generators"].begin(); it != j["generators"].end(); ++it) {
        int g = inst.require_gen(it.key());
        const json& x = it.value().at("x");
        const json& p = it.value().at("p");
        if (static_cast<int>(x.size()) != inst.horizon || static_cast<int>(p.size()) != inst.horizon)
            throw InvariantError("schedule generator " + it.key() + ": array length mismatch");
        for (int t = 0; t < inst.horizon; ++t) {
            s.x[g][t] = static_cast<uint8_t>(x[t].get<int>());
            s.p[g][t] = p[t].get<double>();
        }
    }
    if (j.contains("curtailment"))
        for (auto it = j["curtailment"].begin(); it != j["curtailment"].end(); ++it) {
            int b = inst.require_bus(it.key());
            if (static_cast<int>(it.value().size()) != inst.horizon)
                throw InvariantError("schedule curtailment " + it.key() + ": array length mismatch");
            for (int t = 0; t < inst.horizon; ++t) s.curtail[b][t] = it.value()[t].get<double>();
        }
    recompute_transitions(s, inst);
    if (j.contains("objective") && j["objective"].contains("total"))
        s.objective = j["objective"]["total"].get<double>();
    return s;
}

Schedule load_schedule_file(const std::string& path, const Instance& inst) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open schedule file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_schedule(buf.str(), inst);
}

}  // namespace scuc
