#include "scuc/instance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace scuc {

using nlohmann::json;

namespace {

constexpr double kSegmentSumTol = 1e-6;

const json& require_field(const json& j, const char* key, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end()) throw ParseError("missing field: " + std::string(key) + " (in " + where + ")");
    return *it;
}

double require_number(const json& j, const char* key, const std::string& where) {
    const json& v = require_field(j, key, where);
    if (!v.is_number()) throw ParseError(std::string(key) + " must be a number (in " + where + ")");
    return v.get<double>();
}

int require_int(const json& j, const char* key, const std::string& where) {
    const json& v = require_field(j, key, where);
    if (!v.is_number_integer()) throw ParseError(std::string(key) + " must be an integer (in " + where + ")");
    return v.get<int>();
}

std::string require_string(const json& j, const char* key, const std::string& where) {
    const json& v = require_field(j, key, where);
    if (!v.is_string()) throw ParseError(std::string(key) + " must be a string (in " + where + ")");
    return v.get<std::string>();
}

bool require_bool(const json& j, const char* key, const std::string& where) {
    const json& v = require_field(j, key, where);
    if (!v.is_boolean()) throw ParseError(std::string(key) + " must be a boolean (in " + where + ")");
    return v.get<bool>();
}

}  // namespace

void Instance::finalize() {
    bus_index.clear();
    line_index.clear();
    gen_index.clear();

    if (horizon < 1) throw InvariantError("meta.horizon: T >= 1 required");
    if (buses.empty()) throw InvariantError("buses: at least one bus required");

    for (size_t i = 0; i < buses.size(); ++i) {
        if (!bus_index.emplace(buses[i], static_cast<int>(i)).second)
            throw InvariantError("buses: duplicate bus id '" + buses[i] + "'");
    }
    for (size_t i = 0; i < lines.size(); ++i) {
        const Line& l = lines[i];
        if (!line_index.emplace(l.id, static_cast<int>(i)).second)
            throw InvariantError("lines: duplicate line id '" + l.id + "'");
        if (!bus_index.count(l.from_bus))
            throw ParseError("line " + l.id + ": dangling reference from_bus '" + l.from_bus + "'");
        if (!bus_index.count(l.to_bus))
            throw ParseError("line " + l.id + ": dangling reference to_bus '" + l.to_bus + "'");
        if (l.from_bus == l.to_bus)
            throw InvariantError("line " + l.id + ": from_bus != to_bus required");
        if (!(l.susceptance > 0.0))
            throw InvariantError("line " + l.id + ": susceptance > 0 required");
        if (!(l.limit_base > 0.0))
            throw InvariantError("line " + l.id + ": limit_base > 0 required");
        if (l.limit_contingency && !(*l.limit_contingency > 0.0))
            throw InvariantError("line " + l.id + ": limit_contingency > 0 required");
    }
    for (size_t i = 0; i < generators.size(); ++i) {
        const Generator& g = generators[i];
        if (!gen_index.emplace(g.id, static_cast<int>(i)).second)
            throw InvariantError("generators: duplicate generator id '" + g.id + "'");
        if (!bus_index.count(g.bus))
            throw ParseError("generator " + g.id + ": dangling reference bus '" + g.bus + "'");
        if (!(g.p_min >= 0.0) || !(g.p_min <= g.p_max))
            throw InvariantError("generator " + g.id + ": 0 <= p_min <= p_max required");
        if (g.min_up < 1) throw InvariantError("generator " + g.id + ": min_up >= 1 required");
        if (g.min_down < 1) throw InvariantError("generator " + g.id + ": min_down >= 1 required");
        double width_sum = 0.0;
        double prev_marginal = -1e300;
        for (size_t k = 0; k < g.cost_segments.size(); ++k) {
            const CostSegment& s = g.cost_segments[k];
            if (s.width < 0.0)
                throw InvariantError("generator " + g.id + ": cost_segments[" + std::to_string(k) +
                                     "].width >= 0 required");
            if (s.marginal_cost < prev_marginal)
                throw InvariantError("generator " + g.id +
                                     ": cost_segments marginal costs must be non-decreasing (convexity)");
            prev_marginal = s.marginal_cost;
            width_sum += s.width;
        }
        if (std::abs(width_sum - (g.p_max - g.p_min)) > kSegmentSumTol)
            throw InvariantError("generator " + g.id + ": cost_segments widths must sum to p_max - p_min");
        if (g.init_min_up_remaining < 0 || g.init_min_down_remaining < 0)
            throw InvariantError("generator " + g.id + ": initial min up/down remaining must be >= 0");
        if (g.init_on) {
            if (g.init_min_down_remaining > 0)
                throw InvariantError("generator " + g.id +
                                     ": init_min_down_remaining must be 0 when init_on is true");
            if (g.init_power < g.p_min - 1e-9 || g.init_power > g.p_max + 1e-9)
                throw InvariantError("generator " + g.id +
                                     ": init_power must lie in [p_min, p_max] when init_on is true");
        } else {
            if (g.init_min_up_remaining > 0)
                throw InvariantError("generator " + g.id +
                                     ": init_min_up_remaining must be 0 when init_on is false");
            if (g.init_power != 0.0)
                throw InvariantError("generator " + g.id + ": init_power must be 0 when init_on is false");
        }
    }

    if (demand.size() != buses.size()) throw InvariantError("demand: one row per bus required");
    for (size_t b = 0; b < demand.size(); ++b) {
        if (demand[b].size() != static_cast<size_t>(horizon))
            throw InvariantError("demand[" + buses[b] + "]: expected " + std::to_string(horizon) +
                                 " periods, got " + std::to_string(demand[b].size()));
        for (double d : demand[b])
            if (!(d >= 0.0)) throw InvariantError("demand[" + buses[b] + "]: demand >= 0 required");
    }
    if (!(curtail_penalty >= 0.0)) throw InvariantError("curtail_penalty: must be >= 0");

    // Base-case connectivity.
    {
        std::vector<std::vector<int>> adj(buses.size());
        for (const Line& l : lines) {
            int u = bus_index.at(l.from_bus);
            int v = bus_index.at(l.to_bus);
            adj[u].push_back(v);
            adj[v].push_back(u);
        }
        std::vector<char> seen(buses.size(), 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        size_t reached = 1;
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (int v : adj[u])
                if (!seen[v]) {
                    seen[v] = 1;
                    ++reached;
                    stack.push_back(v);
                }
        }
        if (reached != buses.size())
            throw InvariantError("lines: network must be connected in the base case");
    }

    // Contingencies: resolve references and reject bridge outages.
    contingency_line_index.clear();
    std::vector<std::pair<int, int>> edges;
    edges.reserve(lines.size());
    for (const Line& l : lines)
        edges.emplace_back(bus_index.at(l.from_bus), bus_index.at(l.to_bus));
    std::vector<int> bridges = find_bridges(static_cast<int>(buses.size()), edges);
    std::vector<char> is_bridge(lines.size(), 0);
    for (int b : bridges) is_bridge[b] = 1;

    std::unordered_map<std::string, int> cont_ids;
    for (const Contingency& c : contingencies) {
        if (!cont_ids.emplace(c.id, 0).second)
            throw InvariantError("contingencies: duplicate contingency id '" + c.id + "'");
        auto it = line_index.find(c.outaged_line);
        if (it == line_index.end())
            throw ParseError("contingency " + c.id + ": dangling reference outaged_line '" +
                             c.outaged_line + "'");
        if (is_bridge[it->second])
            throw InvariantError("contingency " + c.id + ": outaged_line '" + c.outaged_line +
                                 "' is a bridge; its outage would island the network");
        contingency_line_index.push_back(it->second);
    }

    // Generator lookup per bus, stable id order.
    gens_at_bus.assign(buses.size(), {});
    std::vector<int> order(generators.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return generators[a].id < generators[b].id; });
    for (int gi : order) gens_at_bus[bus_index.at(generators[gi].bus)].push_back(gi);
}

int Instance::require_bus(const std::string& id) const {
    auto it = bus_index.find(id);
    if (it == bus_index.end()) throw ParseError("unknown bus '" + id + "'");
    return it->second;
}

int Instance::require_line(const std::string& id) const {
    auto it = line_index.find(id);
    if (it == line_index.end()) throw ParseError("unknown line '" + id + "'");
    return it->second;
}

int Instance::require_gen(const std::string& id) const {
    auto it = gen_index.find(id);
    if (it == gen_index.end()) throw ParseError("unknown generator '" + id + "'");
    return it->second;
}

double Instance::total_demand(int t) const {
    double sum = 0.0;
    for (const auto& row : demand) sum += row[t];
    return sum;
}

bool Instance::operator==(const Instance& other) const {
    return name == other.name && horizon == other.horizon && buses == other.buses &&
           lines == other.lines && generators == other.generators &&
           contingencies == other.contingencies && demand == other.demand &&
           curtail_penalty == other.curtail_penalty;
}

std::vector<int> find_bridges(int bus_count, const std::vector<std::pair<int, int>>& edges) {
    // Iterative DFS computing low-links; an edge is a bridge iff low[child] >
    // disc[parent]. Parallel edges are distinguished by edge id, so a doubled
    // circuit is never reported.
    std::vector<std::vector<std::pair<int, int>>> adj(bus_count);  // (neighbor, edge id)
    for (size_t e = 0; e < edges.size(); ++e) {
        adj[edges[e].first].emplace_back(edges[e].second, static_cast<int>(e));
        adj[edges[e].second].emplace_back(edges[e].first, static_cast<int>(e));
    }
    std::vector<int> disc(bus_count, -1), low(bus_count, 0);
    std::vector<int> bridges;
    int timer = 0;

    struct Frame {
        int node;
        int via_edge;
        size_t next;
    };
    std::vector<Frame> stack;
    for (int root = 0; root < bus_count; ++root) {
        if (disc[root] >= 0) continue;
        disc[root] = low[root] = timer++;
        stack.push_back({root, -1, 0});
        while (!stack.empty()) {
            Frame& f = stack.back();
            if (f.next < adj[f.node].size()) {
                auto [v, eid] = adj[f.node][f.next++];
                if (eid == f.via_edge) continue;
                if (disc[v] < 0) {
                    disc[v] = low[v] = timer++;
                    stack.push_back({v, eid, 0});
                } else {
                    low[f.node] = std::min(low[f.node], disc[v]);
                }
            } else {
                int child = f.node;
                int eid = f.via_edge;
                stack.pop_back();
                if (!stack.empty()) {
                    int parent = stack.back().node;
                    low[parent] = std::min(low[parent], low[child]);
                    if (low[child] > disc[parent]) bridges.push_back(eid);
                }
            }
        }
    }
    std::sort(bridges.begin(), bridges.end());
    return bridges;
}

Instance parse_instance(const std::string& document) {
    json j;
    try {
        j = json::parse(document);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("syntax error: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("top-level document must be a JSON object");

    Instance inst;
    const json& meta = require_field(j, "meta", "document");
    inst.name = require_string(meta, "name", "meta");
    inst.horizon = require_int(meta, "horizon", "meta");

    const json& buses = require_field(j, "buses", "document");
    if (!buses.is_array()) throw ParseError("buses must be an array");
    for (const auto& b : buses) {
        if (!b.is_string()) throw ParseError("buses entries must be bus-id strings");
        inst.buses.push_back(b.get<std::string>());
    }

    const json& lines = require_field(j, "lines", "document");
    if (!lines.is_array()) throw ParseError("lines must be an array");
    for (const auto& lj : lines) {
        Line l;
        l.id = require_string(lj, "id", "lines[]");
        const std::string where = "line " + l.id;
        l.from_bus = require_string(lj, "from_bus", where);
        l.to_bus = require_string(lj, "to_bus", where);
        l.susceptance = require_number(lj, "susceptance", where);
        l.limit_base = require_number(lj, "limit_base", where);
        if (lj.contains("limit_contingency") && !lj["limit_contingency"].is_null())
            l.limit_contingency = lj["limit_contingency"].get<double>();
        inst.lines.push_back(std::move(l));
    }

    const json& gens = require_field(j, "generators", "document");
    if (!gens.is_array()) throw ParseError("generators must be an array");
    for (const auto& gj : gens) {
        Generator g;
        g.id = require_string(gj, "id", "generators[]");
        const std::string where = "generator " + g.id;
        g.bus = require_string(gj, "bus", where);
        g.p_min = require_number(gj, "p_min", where);
        g.p_max = require_number(gj, "p_max", where);
        g.startup_cap = require_number(gj, "startup_cap", where);
        g.shutdown_cap = require_number(gj, "shutdown_cap", where);
        g.ramp_up = require_number(gj, "ramp_up", where);
        g.ramp_down = require_number(gj, "ramp_down", where);
        g.min_up = require_int(gj, "min_up", where);
        g.min_down = require_int(gj, "min_down", where);
        g.cost_startup = require_number(gj, "cost_startup", where);
        g.cost_noload = require_number(gj, "cost_noload", where);
        g.cost_at_min = require_number(gj, "cost_at_min", where);
        const json& segs = require_field(gj, "cost_segments", where);
        if (!segs.is_array()) throw ParseError(where + ": cost_segments must be an array");
        for (const auto& sj : segs) {
            CostSegment s;
            s.width = require_number(sj, "width", where + ".cost_segments[]");
            s.marginal_cost = require_number(sj, "marginal_cost", where + ".cost_segments[]");
            g.cost_segments.push_back(s);
        }
        g.init_on = require_bool(gj, "init_on", where);
        g.init_min_up_remaining = require_int(gj, "init_min_up_remaining", where);
        g.init_min_down_remaining = require_int(gj, "init_min_down_remaining", where);
        g.init_power = require_number(gj, "init_power", where);
        inst.generators.push_back(std::move(g));
    }

    const json& conts = require_field(j, "contingencies", "document");
    if (!conts.is_array()) throw ParseError("contingencies must be an array");
    for (const auto& cj : conts) {
        Contingency c;
        c.id = require_string(cj, "id", "contingencies[]");
        c.outaged_line = require_string(cj, "outaged_line", "contingency " + c.id);
        inst.contingencies.push_back(std::move(c));
    }

    const json& demand = require_field(j, "demand", "document");
    if (!demand.is_object()) throw ParseError("demand must map bus-id to an array of T values");
    inst.demand.assign(inst.buses.size(), std::vector<double>(inst.horizon, 0.0));
    std::unordered_map<std::string, int> bus_pos;
    for (size_t i = 0; i < inst.buses.size(); ++i) bus_pos[inst.buses[i]] = static_cast<int>(i);
    for (auto it = demand.begin(); it != demand.end(); ++it) {
        auto bp = bus_pos.find(it.key());
        if (bp == bus_pos.end())
            throw ParseError("demand: dangling reference to unknown bus '" + it.key() + "'");
        if (!it.value().is_array())
            throw ParseError("demand[" + it.key() + "] must be an array of " +
                             std::to_string(inst.horizon) + " values");
        std::vector<double> row;
        for (const auto& v : it.value()) {
            if (!v.is_number()) throw ParseError("demand[" + it.key() + "]: values must be numbers");
            row.push_back(v.get<double>());
        }
        if (row.size() != static_cast<size_t>(inst.horizon))
            throw InvariantError("demand[" + it.key() + "]: expected " + std::to_string(inst.horizon) +
                                 " periods, got " + std::to_string(row.size()));
        inst.demand[bp->second] = std::move(row);
    }

    inst.curtail_penalty = require_number(j, "curtail_penalty", "document");

    inst.finalize();
    return inst;
}

Instance load_instance_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open instance file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_instance(buf.str());
}

std::string serialize_instance(const Instance& inst) {
    json j;
    j["meta"] = {{"name", inst.name}, {"horizon", inst.horizon}};
    j["buses"] = inst.buses;
    json lines = json::array();
    for (const Line& l : inst.lines) {
        json lj = {{"id", l.id},
                   {"from_bus", l.from_bus},
                   {"to_bus", l.to_bus},
                   {"susceptance", l.susceptance},
                   {"limit_base", l.limit_base}};
        if (l.limit_contingency) lj["limit_contingency"] = *l.limit_contingency;
        lines.push_back(std::move(lj));
    }
    j["lines"] = std::move(lines);
    json gens = json::array();
    for (const Generator& g : inst.generators) {
        json segs = json::array();
        for (const CostSegment& s : g.cost_segments)
            segs.push_back({{"width", s.width}, {"marginal_cost", s.marginal_cost}});
        gens.push_back({{"id", g.id},
                        {"bus", g.bus},
                        {"p_min", g.p_min},
                        {"p_max", g.p_max},
                        {"startup_cap", g.startup_cap},
                        {"shutdown_cap", g.shutdown_cap},
                        {"ramp_up", g.ramp_up},
                        {"ramp_down", g.ramp_down},
                        {"min_up", g.min_up},
                        {"min_down", g.min_down},
                        {"cost_startup", g.cost_startup},
                        {"cost_noload", g.cost_noload},
                        {"cost_at_min", g.cost_at_min},
                        {"cost_segments", std::move(segs)},
                        {"init_on", g.init_on},
                        {"init_min_up_remaining", g.init_min_up_remaining},
                        {"init_min_down_remaining", g.init_min_down_remaining},
                        {"init_power", g.init_power}});
    }
    j["generators"] = std::move(gens);
    json conts = json::array();
    for (const Contingency& c : inst.contingencies)
        conts.push_back({{"id", c.id}, {"outaged_line", c.outaged_line}});
    j["contingencies"] = std::move(conts);
    json demand = json::object();
    for (size_t b = 0; b < inst.buses.size(); ++b) demand[inst.buses[b]] = inst.demand[b];
    j["demand"] = std::move(demand);
    j["curtail_penalty"] = inst.curtail_penalty;
    return j.dump(2) + "\n";
}

std::vector<std::string> generators_at_bus(const Instance& inst, const std::string& bus) {
    int b = inst.require_bus(bus);
    std::vector<std::string> out;
    out.reserve(inst.gens_at_bus[b].size());
    for (int gi : inst.gens_at_bus[b]) out.push_back(inst.generators[gi].id);
    return out;
}

}  // namespace scuc
