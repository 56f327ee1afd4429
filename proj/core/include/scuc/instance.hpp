#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "scuc/errors.hpp"

namespace scuc {

/// One convex cost segment above minimum output. Widths over a generator's
/// segments sum to p_max - p_min; marginal costs are non-decreasing.
struct CostSegment {
    double width = 0.0;          // MW
    double marginal_cost = 0.0;  // $/MWh

    bool operator==(const CostSegment&) const = default;
};

struct Generator {
    std::string id;
    std::string bus;
    double p_min = 0.0;         // MW, minimum stable output while committed
    double p_max = 0.0;         // MW
    double startup_cap = 0.0;   // MW producible in the start-up period
    double shutdown_cap = 0.0;  // MW producible in the period before shut-down
    double ramp_up = 0.0;       // MW per period
    double ramp_down = 0.0;     // MW per period
    int min_up = 1;             // periods
    int min_down = 1;           // periods
    double cost_startup = 0.0;  // $ per start
    double cost_noload = 0.0;   // $ per committed period
    double cost_at_min = 0.0;   // $ per committed period, production cost at p_min
    std::vector<CostSegment> cost_segments;
    bool init_on = false;
    int init_min_up_remaining = 0;    // periods the unit must still stay on
    int init_min_down_remaining = 0;  // periods the unit must still stay off
    double init_power = 0.0;          // MW at the period before the horizon

    bool operator==(const Generator&) const = default;
};

struct Line {
    std::string id;
    std::string from_bus;
    std::string to_bus;
    double susceptance = 0.0;  // per-unit, > 0
    double limit_base = 0.0;   // MW
    std::optional<double> limit_contingency;  // MW; defaults to limit_base

    double contingency_limit() const { return limit_contingency.value_or(limit_base); }

    bool operator==(const Line&) const = default;
};

struct Contingency {
    std::string id;
    std::string outaged_line;

    bool operator==(const Contingency&) const = default;
};

/// Immutable problem data: grid, fleet, demand time series, initial state.
/// Safe to share across concurrent readers once constructed.
struct Instance {
    std::string name;
    int horizon = 0;  // T
    std::vector<std::string> buses;
    std::vector<Line> lines;
    std::vector<Generator> generators;
    std::vector<Contingency> contingencies;
    std::vector<std::vector<double>> demand;  // [bus][t], MW, t in 0..T-1
    double curtail_penalty = 0.0;             // $/MWh

    // Derived lookups, filled by finalize().
    std::unordered_map<std::string, int> bus_index;
    std::unordered_map<std::string, int> line_index;
    std::unordered_map<std::string, int> gen_index;
    std::vector<std::vector<int>> gens_at_bus;   // bus index -> gen indices, id order
    std::vector<int> contingency_line_index;     // contingency index -> line index

    /// Builds the lookup tables and validates every invariant; throws
    /// InvariantError naming the field and invariant on the first violation.
    void finalize();

    int require_bus(const std::string& id) const;
    int require_line(const std::string& id) const;
    int require_gen(const std::string& id) const;

    double total_demand(int t) const;  // t is 0-based

    bool operator==(const Instance& other) const;
};

/// Parses and validates an instance document (UTF-8 JSON).
/// Errors: ParseError (syntax, missing field, dangling reference) and
/// InvariantError (named invariant violations, including bridge contingencies).
Instance parse_instance(const std::string& document);
Instance load_instance_file(const std::string& path);

/// Serializes to the same schema parse_instance accepts; parse(serialize(i))
/// reproduces an identical Instance.
std::string serialize_instance(const Instance& instance);

/// The exact generator set at a bus, in stable id order. Throws on unknown bus.
std::vector<std::string> generators_at_bus(const Instance& instance, const std::string& bus);

/// Line indices whose removal disconnects the network (multigraph-aware:
/// parallel circuits are never bridges). Used to reject contingencies at load.
std::vector<int> find_bridges(int bus_count, const std::vector<std::pair<int, int>>& edges);

}  // namespace scuc
