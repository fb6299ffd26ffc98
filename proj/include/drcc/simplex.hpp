#pragma once

#include "drcc/types.hpp"

namespace drcc {

/// min c^T x  s.t.  row_lo <= A x <= row_hi,  col_lo <= x <= col_hi.
/// Infinite bounds are allowed; row_lo == row_hi encodes an equality.
struct LpProblem {
    Eigen::MatrixXd A;
    Vector row_lo;
    Vector row_hi;
    Vector col_lo;
    Vector col_hi;
    Vector cost;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct SimplexOptions {
    double feasibility_tol = 1e-9;
    double optimality_tol = 1e-9;
    double pivot_tol = 1e-9;
    long max_iterations = 200000;
    int refactor_interval = 64;
    /// consecutive degenerate pivots before switching to Bland's rule
    int degenerate_switch = 30;
};

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    Vector x;
    double objective = 0.0;
    /// Row multipliers y (one per row of A); reduced costs d = c - A^T y.
    Vector duals;
    Vector reduced_costs;
    /// Value of the dual objective reconstructed from the final basis.
    double dual_objective = 0.0;
    long iterations = 0;
};

/// Bounded-variable primal simplex on a dense tableau. Phase 1 drives
/// artificial variables to zero; pricing is Dantzig's rule with a fallback to
/// Bland's rule on degenerate stalls. Throws NumericalError on a singular
/// basis.
LpSolution simplex_solve(const LpProblem& lp, const SimplexOptions& options = {});

} // namespace drcc
