#pragma once

#include <Eigen/Dense>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <unordered_map>
#include <vector>

#include "scuc/instance.hpp"

namespace scuc {

/// DC power-flow sensitivities for one instance: base-case PTDF, line-outage
/// distribution factors per admitted contingency, and a lazily filled cache of
/// post-contingency PTDF rows. Immutable after build except the row cache,
/// which is idempotent and safe under concurrent readers.
class SensitivitySet {
public:
    int reference_bus() const { return reference_bus_; }
    int line_count() const { return static_cast<int>(ptdf_base_.rows()); }
    int bus_count() const { return static_cast<int>(ptdf_base_.cols()); }

    const Eigen::MatrixXd& ptdf_base() const { return ptdf_base_; }

    /// LODF column for contingency c: fraction of the outaged line's
    /// pre-contingency flow redistributed onto each surviving line.
    const Eigen::VectorXd& lodf(int contingency) const { return lodf_[contingency]; }

    /// Post-contingency PTDF row for (line, contingency):
    /// row = base row of line + LODF[line, k] * base row of outaged line k.
    /// Cached on first use. Throws NetworkError for the outaged line itself.
    const Eigen::VectorXd& contingency_ptdf_row(int line, int contingency) const;

    /// Flows from net bus injections, base case (contingency = -1) or under a
    /// contingency. Injections must balance to zero within 1e-6 MW.
    /// The outaged line's slot is 0 under its own contingency.
    Eigen::VectorXd line_flows(const Eigen::VectorXd& injections, int contingency = -1) const;

    friend SensitivitySet build_sensitivities(const Instance& instance, int reference_bus);

private:
    int reference_bus_ = 0;
    Eigen::MatrixXd ptdf_base_;            // line x bus, reference column all zero
    std::vector<Eigen::VectorXd> lodf_;    // per contingency, length = lines
    std::vector<int> outaged_line_;        // per contingency

    mutable std::shared_mutex cache_mutex_;
    mutable std::unordered_map<long long, std::shared_ptr<Eigen::VectorXd>> row_cache_;
};

/// Computes PTDF and per-contingency LODF factors by factorizing the reduced
/// nodal susceptance matrix. reference_bus = -1 picks the lowest-indexed bus.
/// Errors: disconnected base network; singular reduced susceptance system;
/// a contingency whose LODF denominator flags a bridge.
SensitivitySet build_sensitivities(const Instance& instance, int reference_bus = -1);

/// Debug dump of ptdf_base as CSV (line-id, bus-id, value), 12 significant digits.
std::string dump_ptdf_csv(const Instance& instance, const SensitivitySet& sens);

}  // namespace scuc
