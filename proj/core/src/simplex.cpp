#include "scuc/simplex.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>

#include "scuc/errors.hpp"

namespace scuc {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr uint8_t kBasic = 0;
constexpr uint8_t kAtLower = 1;
constexpr uint8_t kAtUpper = 2;
constexpr double kDropTol = 1e-11;   // treat FTRAN entries below this as zero
constexpr double kRatioTieTol = 1e-9;
constexpr int kStallLimit = 2000;    // degenerate pivots before Bland's rule
}  // namespace

struct SimplexSolver::Impl {
    Options opts;
    int n = 0;  // structural columns
    int m = 0;  // rows
    std::vector<std::vector<LinTerm>> cols;  // structural columns, by row index
    std::vector<double> lo, up;              // length n + m
    std::vector<double> obj;                 // length n (slack cost 0)
    std::vector<double> rhs;                 // length m

    std::vector<uint8_t> vstat;  // length n + m
    std::vector<int> basic;      // length m, variable index per basis position
    std::vector<int> basis_pos;  // length n + m, -1 when nonbasic
    std::vector<double> x;       // length n + m

    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    bool factor_valid = false;
    bool values_dirty = true;

    struct Eta {
        int pos;
        std::vector<std::pair<int, double>> col;
        double pivot;
    };
    std::vector<Eta> etas;

    long total_iterations = 0;
    double cost_scale = 1.0;
    std::vector<double> col_values_out;

    int ntot() const { return n + m; }

    double slack_lo(Sense s) const { return s == Sense::ge ? -kInf : 0.0; }
    double slack_up(Sense s) const { return s == Sense::le ? kInf : 0.0; }

    void append_column_entries(int var, Eigen::VectorXd& out, double scale) const {
        if (var < n) {
            for (const LinTerm& t : cols[var]) out(t.var) += scale * t.coef;
        } else {
            out(var - n) += scale;
        }
    }

    void factorize() {
        std::vector<Eigen::Triplet<double>> trips;
        for (int p = 0; p < m; ++p) {
            int var = basic[p];
            if (var < n) {
                for (const LinTerm& t : cols[var]) trips.emplace_back(t.var, p, t.coef);
            } else {
                trips.emplace_back(var - n, p, 1.0);
            }
        }
        Eigen::SparseMatrix<double> B(m, m);
        B.setFromTriplets(trips.begin(), trips.end());
        lu.compute(B);
        if (lu.info() != Eigen::Success) {
            // Singular basis (possible after an inconsistent restore); fall
            // back to the all-slack basis, which is always invertible.
            reset_basis_internal();
            B.setZero();
            std::vector<Eigen::Triplet<double>> ident;
            ident.reserve(m);
            for (int p = 0; p < m; ++p) ident.emplace_back(p, p, 1.0);
            B.setFromTriplets(ident.begin(), ident.end());
            lu.compute(B);
            if (lu.info() != Eigen::Success) throw SolverError("simplex: basis factorization failed");
        }
        etas.clear();
        factor_valid = true;
    }

    void reset_basis_internal() {
        vstat.assign(ntot(), kAtLower);
        basic.resize(m);
        basis_pos.assign(ntot(), -1);
        for (int j = 0; j < n; ++j) {
            if (lo[j] > -kInf) {
                vstat[j] = kAtLower;
            } else if (up[j] < kInf) {
                vstat[j] = kAtUpper;
            } else {
                throw SolverError("simplex: free columns are unsupported");
            }
        }
        for (int i = 0; i < m; ++i) {
            int sv = n + i;
            vstat[sv] = kBasic;
            basic[i] = sv;
            basis_pos[sv] = i;
        }
        factor_valid = false;
        values_dirty = true;
    }

    // y <- B^-1 v, applying the base factorization then the eta file in order.
    void ftran(Eigen::VectorXd& v) const {
        v = lu.solve(v).eval();
        for (const Eta& e : etas) {
            double yr = v(e.pos) / e.pivot;
            if (yr != 0.0) {
                for (const auto& [i, wi] : e.col)
                    if (i != e.pos) v(i) -= wi * yr;
            }
            v(e.pos) = yr;
        }
    }

    // y <- B^-T v: etas transposed in reverse order, then the base transpose solve.
    void btran(Eigen::VectorXd& v) const {
        for (auto it = etas.rbegin(); it != etas.rend(); ++it) {
            double acc = v(it->pos);
            for (const auto& [i, wi] : it->col)
                if (i != it->pos) acc -= wi * v(i);
            v(it->pos) = acc / it->pivot;
        }
        v = lu.adjoint().solve(v).eval();
    }

    void snap_nonbasics() {
        for (int j = 0; j < ntot(); ++j) {
            if (vstat[j] == kAtLower) {
                x[j] = (lo[j] > -kInf) ? lo[j] : up[j];
                if (lo[j] <= -kInf) vstat[j] = kAtUpper;
            } else if (vstat[j] == kAtUpper) {
                x[j] = (up[j] < kInf) ? up[j] : lo[j];
                if (up[j] >= kInf) vstat[j] = kAtLower;
            }
        }
    }

    void recompute_basics() {
        Eigen::VectorXd r = Eigen::Map<const Eigen::VectorXd>(rhs.data(), m);
        for (int j = 0; j < ntot(); ++j) {
            if (vstat[j] == kBasic || x[j] == 0.0) continue;
            append_column_entries(j, r, -x[j]);
        }
        ftran(r);
        for (int p = 0; p < m; ++p) x[basic[p]] = r(p);
    }

    double infeasibility() const {
        double sum = 0.0;
        for (int p = 0; p < m; ++p) {
            int v = basic[p];
            if (x[v] < lo[v] - opts.feas_tol) sum += lo[v] - x[v];
            else if (x[v] > up[v] + opts.feas_tol) sum += x[v] - up[v];
        }
        return sum;
    }

    bool primal_feasible() const {
        for (int p = 0; p < m; ++p) {
            int v = basic[p];
            if (x[v] < lo[v] - opts.feas_tol || x[v] > up[v] + opts.feas_tol) return false;
        }
        return true;
    }

    long iteration_cap() const {
        return opts.iteration_limit > 0 ? opts.iteration_limit
                                        : 20000 + 40L * (static_cast<long>(n) + m);
    }

    // One simplex phase; phase 1 uses composite infeasibility costs and the
    // first-breakpoint ratio test, phase 2 the standard bounded rules.
    // Returns optimal when priced out, infeasible/unbounded as discovered.
    LpStatus run_phase(int phase, long& iter_budget) {
        Eigen::VectorXd y(m), w(m);
        int stall = 0;
        bool bland = false;

        while (iter_budget-- > 0) {
            if (static_cast<int>(etas.size()) >= opts.refactor_interval) {
                factorize();
                recompute_basics();
            }
            if (phase == 1 && infeasibility() <= opts.feas_tol) return LpStatus::optimal;

            // Pricing: y = B^-T c_B, reduced cost d_j = c_j - y . a_j.
            y.setZero();
            for (int p = 0; p < m; ++p) {
                int v = basic[p];
                if (phase == 1) {
                    if (x[v] < lo[v] - opts.feas_tol) y(p) = -1.0;
                    else if (x[v] > up[v] + opts.feas_tol) y(p) = 1.0;
                } else if (v < n) {
                    y(p) = obj[v];
                }
            }
            btran(y);

            const double dual_tol = opts.opt_tol * std::max(1.0, phase == 2 ? cost_scale : 1.0);
            int q = -1;
            int dir = 0;
            double best_score = dual_tol;
            for (int j = 0; j < ntot(); ++j) {
                if (vstat[j] == kBasic) continue;
                if (up[j] - lo[j] < 1e-14) continue;  // fixed
                double cj = (phase == 2 && j < n) ? obj[j] : 0.0;
                double d = cj;
                if (j < n) {
                    for (const LinTerm& t : cols[j]) d -= y(t.var) * t.coef;
                } else {
                    d -= y(j - n);
                }
                double score = 0.0;
                int cand_dir = 0;
                if (vstat[j] == kAtLower && d < -dual_tol) {
                    score = -d;
                    cand_dir = 1;
                } else if (vstat[j] == kAtUpper && d > dual_tol) {
                    score = d;
                    cand_dir = -1;
                } else {
                    continue;
                }
                if (bland) {  // lowest eligible index
                    q = j;
                    dir = cand_dir;
                    break;
                }
                if (score > best_score) {
                    best_score = score;
                    q = j;
                    dir = cand_dir;
                }
            }
            if (q < 0) {
                if (phase == 1)
                    return infeasibility() <= opts.feas_tol ? LpStatus::optimal : LpStatus::infeasible;
                return LpStatus::optimal;
            }

            // FTRAN the entering column.
            w.setZero();
            append_column_entries(q, w, 1.0);
            ftran(w);

            // Ratio test. rate = change of basic var per unit of entering step.
            double best_delta = up[q] - lo[q];  // bound-to-bound flip
            int leave_pos = -1;
            uint8_t leave_to = kAtLower;
            double leave_pivot = 0.0;
            for (int p = 0; p < m; ++p) {
                double wp = w(p);
                if (std::abs(wp) <= kDropTol) continue;
                double rate = -dir * wp;
                int v = basic[p];
                double cand;
                uint8_t to;
                if (phase == 1 && x[v] < lo[v] - opts.feas_tol) {
                    if (rate <= opts.pivot_tol) continue;
                    cand = (lo[v] - x[v]) / rate;
                    to = kAtLower;
                } else if (phase == 1 && x[v] > up[v] + opts.feas_tol) {
                    if (rate >= -opts.pivot_tol) continue;
                    cand = (up[v] - x[v]) / rate;
                    to = kAtUpper;
                } else if (rate > opts.pivot_tol) {
                    if (up[v] >= kInf) continue;
                    cand = (up[v] - x[v]) / rate;
                    to = kAtUpper;
                } else if (rate < -opts.pivot_tol) {
                    if (lo[v] <= -kInf) continue;
                    cand = (lo[v] - x[v]) / rate;
                    to = kAtLower;
                } else {
                    continue;
                }
                if (cand < 0.0) cand = 0.0;
                bool take;
                if (cand < best_delta - kRatioTieTol) {
                    take = true;
                } else if (cand <= best_delta + kRatioTieTol && leave_pos >= 0) {
                    take = bland ? basic[p] < basic[leave_pos]
                                 : std::abs(wp) > std::abs(leave_pivot) + 1e-12;
                } else if (cand <= best_delta + kRatioTieTol && leave_pos < 0 &&
                           cand <= best_delta) {
                    take = true;
                } else {
                    take = false;
                }
                if (take) {
                    best_delta = cand;
                    leave_pos = p;
                    leave_to = to;
                    leave_pivot = wp;
                }
            }

            if (!std::isfinite(best_delta)) {
                if (phase == 1) throw SolverError("simplex: phase-1 ray without breakpoint");
                return LpStatus::unbounded;
            }

            ++total_iterations;
            stall = (best_delta <= 1e-12) ? stall + 1 : 0;
            if (stall > kStallLimit) bland = true;
            else if (best_delta > 1e-10) bland = false;

            double delta = std::max(best_delta, 0.0);
            // Move the entering variable and update the basics it touches.
            x[q] += dir * delta;
            if (delta != 0.0)
                for (int p = 0; p < m; ++p) {
                    double wp = w(p);
                    if (std::abs(wp) > kDropTol) x[basic[p]] -= delta * dir * wp;
                }

            if (leave_pos < 0) {
                // Bound flip, no basis change.
                vstat[q] = (vstat[q] == kAtLower) ? kAtUpper : kAtLower;
                x[q] = (vstat[q] == kAtLower) ? lo[q] : up[q];
                continue;
            }

            int leaving = basic[leave_pos];
            x[leaving] = (leave_to == kAtLower) ? lo[leaving] : up[leaving];
            vstat[leaving] = leave_to;
            basis_pos[leaving] = -1;
            vstat[q] = kBasic;
            basic[leave_pos] = q;
            basis_pos[q] = leave_pos;

            Eta e;
            e.pos = leave_pos;
            e.pivot = w(leave_pos);
            for (int p = 0; p < m; ++p)
                if (std::abs(w(p)) > kDropTol) e.col.emplace_back(p, w(p));
            etas.push_back(std::move(e));

            if (std::abs(e.pivot) < opts.pivot_tol) {
                factorize();
                recompute_basics();
            }
        }
        return LpStatus::iteration_limit;
    }

    LpStatus solve() {
        if (m == 0) {
            // Boundless of rows: each column sits at its cheaper bound.
            for (int j = 0; j < n; ++j)
                x[j] = (obj[j] >= 0.0) ? (lo[j] > -kInf ? lo[j] : up[j])
                                       : (up[j] < kInf ? up[j] : lo[j]);
            return LpStatus::optimal;
        }
        for (int attempt = 0; attempt < 3; ++attempt) {
            if (!factor_valid) factorize();
            snap_nonbasics();
            recompute_basics();
            values_dirty = false;

            long budget = iteration_cap();
            LpStatus st = run_phase(1, budget);
            if (st == LpStatus::optimal) st = run_phase(2, budget);
            if (st == LpStatus::infeasible || st == LpStatus::unbounded) return st;

            // Refresh values from a clean factorization and accept only a
            // solution that is actually feasible at the stated tolerance.
            factorize();
            recompute_basics();
            if (st == LpStatus::optimal && primal_feasible()) return LpStatus::optimal;

            // Numerical trouble: escalate the pivot tolerance and retry.
            opts.pivot_tol *= 10.0;
        }
        throw SolverError("simplex: numerical failure after pivot-tolerance escalation");
    }
};

SimplexSolver::SimplexSolver() : impl_(std::make_unique<Impl>()) {}
SimplexSolver::~SimplexSolver() = default;
SimplexSolver::SimplexSolver(SimplexSolver&&) noexcept = default;
SimplexSolver& SimplexSolver::operator=(SimplexSolver&&) noexcept = default;

void SimplexSolver::load(std::vector<double> lo, std::vector<double> up, std::vector<double> obj,
                         const std::vector<LpRowDef>& rows, const Options& opts) {
    Impl& im = *impl_;
    im.opts = opts;
    im.n = static_cast<int>(obj.size());
    im.m = 0;
    im.cols.assign(im.n, {});
    im.obj = std::move(obj);
    im.lo = std::move(lo);
    im.up = std::move(up);
    if (static_cast<int>(im.lo.size()) != im.n || static_cast<int>(im.up.size()) != im.n)
        throw SolverError("simplex: bound vectors do not match the column count");
    im.rhs.clear();
    im.cost_scale = 1.0;
    for (double c : im.obj) im.cost_scale = std::max(im.cost_scale, std::abs(c));
    im.x.assign(im.n, 0.0);
    im.total_iterations = 0;
    for (const LpRowDef& r : rows) add_row(r);
    im.reset_basis_internal();
}

int SimplexSolver::add_row(const LpRowDef& row) {
    Impl& im = *impl_;
    const int i = im.m;
    for (const LinTerm& t : row.terms) {
        if (t.var < 0 || t.var >= im.n) throw SolverError("simplex: row references unknown column");
        im.cols[t.var].push_back({i, t.coef});
    }
    im.rhs.push_back(row.rhs);
    im.lo.insert(im.lo.begin() + im.n + i, im.slack_lo(row.sense));
    im.up.insert(im.up.begin() + im.n + i, im.slack_up(row.sense));
    ++im.m;
    im.x.push_back(0.0);
    if (!im.vstat.empty()) {
        im.vstat.push_back(kBasic);
        im.basic.push_back(im.n + i);
        im.basis_pos.push_back(i);
    }
    im.factor_valid = false;
    im.values_dirty = true;
    return i;
}

void SimplexSolver::set_bounds(int col, double lo, double up) {
    Impl& im = *impl_;
    if (col < 0 || col >= im.n) throw SolverError("simplex: bound change on unknown column");
    im.lo[col] = lo;
    im.up[col] = up;
    im.values_dirty = true;
}

void SimplexSolver::reset_basis() { impl_->reset_basis_internal(); }

LpStatus SimplexSolver::solve() { return impl_->solve(); }

double SimplexSolver::objective() const {
    const Impl& im = *impl_;
    double v = 0.0;
    for (int j = 0; j < im.n; ++j) v += im.obj[j] * im.x[j];
    return v;
}

const std::vector<double>& SimplexSolver::column_values() const {
    Impl& im = *impl_;
    im.col_values_out.assign(im.x.begin(), im.x.begin() + im.n);
    return im.col_values_out;
}

long SimplexSolver::iterations() const { return impl_->total_iterations; }
int SimplexSolver::col_count() const { return impl_->n; }
int SimplexSolver::row_count() const { return impl_->m; }

std::vector<uint8_t> SimplexSolver::basis_snapshot() const { return impl_->vstat; }

void SimplexSolver::restore_basis(const std::vector<uint8_t>& snapshot) {
    Impl& im = *impl_;
    if (snapshot.size() > static_cast<size_t>(im.ntot()) ||
        snapshot.size() < static_cast<size_t>(im.n))
        throw SolverError("simplex: basis snapshot does not match the problem");
    im.vstat.assign(im.ntot(), kBasic);
    std::copy(snapshot.begin(), snapshot.end(), im.vstat.begin());
    im.basic.clear();
    im.basis_pos.assign(im.ntot(), -1);
    for (int j = 0; j < im.ntot(); ++j)
        if (im.vstat[j] == kBasic) im.basic.push_back(j);
    if (static_cast<int>(im.basic.size()) != im.m) {
        im.reset_basis_internal();
        return;
    }
    for (int p = 0; p < im.m; ++p) im.basis_pos[im.basic[p]] = p;
    im.factor_valid = false;
    im.values_dirty = true;
}

}  // namespace scuc
