#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "scuc/model.hpp"

namespace scuc {

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

struct LpRowDef {
    std::vector<LinTerm> terms;
    Sense sense;
    double rhs;
};

/// Bounded-variable revised primal simplex over the system A x + s = b with
/// slack bounds derived from each row's sense. Phase 1 minimizes the sum of
/// basic bound violations (composite costs), so any basis - in particular a
/// warm-started one after bound changes or row additions - is a valid start.
///
/// Rows may be appended between solves; the new slack enters the basis, which
/// keeps the factorization pattern valid for the extended system. Bound
/// changes keep the basis. Determinism: all pricing and ratio tie-breaks are
/// by index, so identical call sequences reproduce identical pivots.
class SimplexSolver {
public:
    struct Options {
        double pivot_tol = 1e-9;   // minimal acceptable pivot magnitude
        double feas_tol = 1e-7;    // absolute primal feasibility tolerance
        double opt_tol = 1e-9;     // reduced-cost tolerance (scaled by cost magnitude)
        int refactor_interval = 100;
        long iteration_limit = 0;  // 0 = automatic from problem size
    };

    SimplexSolver();
    ~SimplexSolver();
    SimplexSolver(SimplexSolver&&) noexcept;
    SimplexSolver& operator=(SimplexSolver&&) noexcept;

    /// Loads a fresh problem; every structural column needs at least one
    /// finite bound. Starts from the all-slack basis.
    void load(std::vector<double> lo, std::vector<double> up, std::vector<double> obj,
              const std::vector<LpRowDef>& rows, const Options& opts = {});

    int add_row(const LpRowDef& row);
    void set_bounds(int col, double lo, double up);
    void reset_basis();

    LpStatus solve();

    double objective() const;
    /// Structural column values (first n entries of the variable space).
    const std::vector<double>& column_values() const;
    long iterations() const;
    int col_count() const;
    int row_count() const;

    /// Basis statuses over columns-then-slacks; restoring a shorter snapshot
    /// (taken before rows were appended) makes the newer slacks basic.
    std::vector<uint8_t> basis_snapshot() const;
    void restore_basis(const std::vector<uint8_t>& snapshot);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace scuc
