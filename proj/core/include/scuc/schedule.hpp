#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scuc/instance.hpp"

namespace scuc {

struct ObjectiveBreakdown {
    double production = 0.0;
    double startup = 0.0;
    double noload = 0.0;
    double curtailment = 0.0;

    double total() const { return production + startup + noload + curtailment; }
};

/// Where a period's committed values came from.
struct PeriodProvenance {
    enum class Kind : uint8_t { monolithic, fixed_at_iteration, final_completion, rins_pass };
    Kind kind = Kind::monolithic;
    int index = 0;  // iteration / pass number where applicable

    std::string to_string() const;
};

/// Commitment, dispatch and curtailment over the full horizon, plus objective
/// accounting. The unit exchanged between decomposition, RINS and the validator.
struct Schedule {
    int horizon = 0;
    std::vector<std::vector<uint8_t>> x;  // [g][t], t 0-based
    std::vector<std::vector<uint8_t>> z;
    std::vector<std::vector<uint8_t>> w;
    std::vector<std::vector<double>> p;        // [g][t] MW
    std::vector<std::vector<double>> curtail;  // [b][t] MW
    double objective = 0.0;
    ObjectiveBreakdown breakdown;
    std::vector<PeriodProvenance> provenance;  // [t]

    static Schedule zeros(const Instance& instance);
};

/// Rederives startup/shutdown flags from the commitment trajectory and the
/// instance's initial status; guarantees the logic identity at every period.
void recompute_transitions(Schedule& schedule, const Instance& instance);

/// Schedule file: JSON with per-generator arrays x/p, per-bus curtailment and
/// the objective breakdown.
std::string serialize_schedule(const Schedule& schedule, const Instance& instance);
Schedule parse_schedule(const std::string& document, const Instance& instance);
Schedule load_schedule_file(const std::string& path, const Instance& instance);

}  // namespace scuc
