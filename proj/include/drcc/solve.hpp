#pragma once

#include "drcc/mip_model.hpp"

#include <string>
#include <utility>
#include <vector>

namespace drcc {

enum class SolveStatus { Optimal, Infeasible, Unbounded, TimeLimit };

std::string status_name(SolveStatus status);

struct SolveOptions {
    double time_limit = kInf; ///< seconds
    long node_limit = 2000000;
    double relative_gap = 1e-6;
    double integrality_tol = 1e-6;
    SimplexOptions lp;
};

struct SolveResult {
    SolveStatus status = SolveStatus::Infeasible;
    Vector values;        ///< every model variable
    Vector x;             ///< decision variables only
    double objective = 0.0;
    std::vector<int> q;   ///< rounded indicator pattern
    double bound = 0.0;   ///< best proven lower bound
    double bound_gap = 0.0;
    long node_count = 0;
    long iteration_count = 0;
    std::vector<std::pair<std::string, std::string>> diagnostics;

    bool has_solution() const { return values.size() > 0; }
};

/// Solves a model without binaries by the simplex method.
SolveResult solve_lp(const MipModel& model, const SolveOptions& options = {});

/// Best-bound branch-and-bound on the binary variables. Nodes are explored in
/// order of their parent bound (deeper first, then creation order); branching
/// picks the most fractional binary with ties to the lowest index.
SolveResult solve_mip(const MipModel& model, const SolveOptions& options = {});

/// Largest violation of any row or bound of the model at the given values.
double max_violation(const MipModel& model, const Vector& values);

} // namespace drcc
