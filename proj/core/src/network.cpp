#include "scuc/network.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace scuc {

namespace {

constexpr double kBridgeTol = 1e-8;
constexpr double kBalanceTol = 1e-6;

long long cache_key(int line, int contingency) {
    return static_cast<long long>(contingency) * (1LL << 32) + line;
}

}  // namespace

SensitivitySet build_sensitivities(const Instance& inst, int reference_bus) {
    const int nb = static_cast<int>(inst.buses.size());
    const int nl = static_cast<int>(inst.lines.size());
    if (reference_bus < 0) reference_bus = 0;
    if (reference_bus >= nb) throw NetworkError("reference bus index out of range");

    // Connectivity is an instance invariant, but build_sensitivities is also
    // used on ad-hoc instances in tests; re-check cheaply via the Laplacian
    // rank failure below only would give a poor diagnostic.
    {
        std::vector<std::vector<int>> adj(nb);
        for (const Line& l : inst.lines) {
            int u = inst.bus_index.at(l.from_bus);
            int v = inst.bus_index.at(l.to_bus);
            adj[u].push_back(v);
            adj[v].push_back(u);
        }
        std::vector<char> seen(nb, 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        int reached = 1;
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
        if (reached != nb) throw NetworkError("base network is disconnected");
    }

    SensitivitySet s;
    s.reference_bus_ = reference_bus;
    s.ptdf_base_.setZero(nl, nb);

    if (nl > 0 && nb > 1) {
        // Reduced nodal susceptance matrix: Laplacian weighted by line
        // susceptance, reference row/column deleted.
        auto red = [&](int b) { return b < reference_bus ? b : b - 1; };
        Eigen::MatrixXd bred = Eigen::MatrixXd::Zero(nb - 1, nb - 1);
        for (const Line& l : inst.lines) {
            int u = inst.bus_index.at(l.from_bus);
            int v = inst.bus_index.at(l.to_bus);
            if (u != reference_bus) bred(red(u), red(u)) += l.susceptance;
            if (v != reference_bus) bred(red(v), red(v)) += l.susceptance;
            if (u != reference_bus && v != reference_bus) {
                bred(red(u), red(v)) -= l.susceptance;
                bred(red(v), red(u)) -= l.susceptance;
            }
        }
        Eigen::LDLT<Eigen::MatrixXd> ldlt(bred);
        if (ldlt.info() != Eigen::Success)
            throw NetworkError("singular reduced susceptance system");
        // Theta = Bred^-1 (angles per unit injection at each non-reference bus).
        Eigen::MatrixXd theta = ldlt.solve(Eigen::MatrixXd::Identity(nb - 1, nb - 1));
        double residual =
            (bred * theta - Eigen::MatrixXd::Identity(nb - 1, nb - 1)).cwiseAbs().maxCoeff();
        if (!std::isfinite(residual) || residual > 1e-6)
            throw NetworkError("singular reduced susceptance system");

        for (int li = 0; li < nl; ++li) {
            const Line& l = inst.lines[li];
            int u = inst.bus_index.at(l.from_bus);
            int v = inst.bus_index.at(l.to_bus);
            for (int b = 0; b < nb; ++b) {
                if (b == reference_bus) continue;
                double tu = (u == reference_bus) ? 0.0 : theta(red(u), red(b));
                double tv = (v == reference_bus) ? 0.0 : theta(red(v), red(b));
                s.ptdf_base_(li, b) = l.susceptance * (tu - tv);
            }
        }
    }

    // LODF_{l,k} = d_lk / (1 - d_kk) where d_.k is the PTDF of a unit
    // from->to transfer across the outaged line k.
    s.outaged_line_ = inst.contingency_line_index;
    s.lodf_.reserve(inst.contingencies.size());
    for (size_t c = 0; c < inst.contingencies.size(); ++c) {
        int k = inst.contingency_line_index[c];
        const Line& lk = inst.lines[k];
        int fk = inst.bus_index.at(lk.from_bus);
        int tk = inst.bus_index.at(lk.to_bus);
        Eigen::VectorXd transfer = s.ptdf_base_.col(fk) - s.ptdf_base_.col(tk);
        double denom = 1.0 - transfer(k);
        if (std::abs(denom) < kBridgeTol)
            throw NetworkError("contingency " + inst.contingencies[c].id + ": outaged line '" +
                               lk.id + "' is a bridge (LODF denominator ~ 0)");
        Eigen::VectorXd col = transfer / denom;
        col(k) = 0.0;  // the outaged line carries nothing afterwards
        s.lodf_.push_back(std::move(col));
    }
    return s;
}

const Eigen::VectorXd& SensitivitySet::contingency_ptdf_row(int line, int contingency) const {
    if (contingency < 0 || contingency >= static_cast<int>(lodf_.size()))
        throw NetworkError("unknown contingency index " + std::to_string(contingency));
    if (line < 0 || line >= line_count())
        throw NetworkError("unknown line index " + std::to_string(line));
    int k = outaged_line_[contingency];
    if (line == k)
        throw NetworkError("post-contingency PTDF requested for the outaged line itself");

    const long long key = cache_key(line, contingency);
    {
        std::shared_lock lock(cache_mutex_);
        auto it = row_cache_.find(key);
        if (it != row_cache_.end()) return *it->second;
    }
    auto row = std::make_shared<Eigen::VectorXd>(
        ptdf_base_.row(line).transpose() + lodf_[contingency](line) * ptdf_base_.row(k).transpose());
    std::unique_lock lock(cache_mutex_);
    auto [it, inserted] = row_cache_.emplace(key, std::move(row));
    (void)inserted;  // losing the insert race is fine, the computation is idempotent
    return *it->second;
}

Eigen::VectorXd SensitivitySet::line_flows(const Eigen::VectorXd& injections, int contingency) const {
    if (injections.size() != bus_count())
        throw NetworkError("injection vector dimension mismatch");
    double imbalance = injections.sum();
    if (std::abs(imbalance) > kBalanceTol)
        throw NetworkError("injections unbalanced by " + std::to_string(imbalance) + " MW");
    Eigen::VectorXd base = ptdf_base_ * injections;
    if (contingency < 0) return base;
    if (contingency >= static_cast<int>(lodf_.size()))
        throw NetworkError("unknown contingency index " + std::to_string(contingency));
    int k = outaged_line_[contingency];
    Eigen::VectorXd flows = base + lodf_[contingency] * base(k);
    flows(k) = 0.0;
    return flows;
}

std::string dump_ptdf_csv(const Instance& inst, const SensitivitySet& sens) {
    std::ostringstream os;
    os << "line,bus,value\n";
    char buf[64];
    for (int l = 0; l < sens.line_count(); ++l)
        for (int b = 0; b < sens.bus_count(); ++b) {
            std::snprintf(buf, sizeof buf, "%.12g", sens.ptdf_base()(l, b));
            os << inst.lines[l].id << ',' << inst.buses[b] << ',' << buf << '\n';
        }
    return os.str();
}

}  // namespace scuc
