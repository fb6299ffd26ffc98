#pragma once

#include "drcc/mip_model.hpp"
#include "drcc/model.hpp"
#include "drcc/solve.hpp"

#include <optional>
#include <vector>

namespace drcc {

/// Big-M constant together with the bounds it was derived from.
struct BigM {
    double value = 0.0;
    /// Bound on |safety margin| of any sample over the box (per-row scaled in
    /// the joint case); also bounds the threshold t and the slacks s.
    double expression_bound = 0.0;
    double threshold_bound = 0.0;
    Box box;
};

/// Interval-arithmetic bound over the bounding box of X, doubled for margin.
BigM derive_big_m(const ChanceProgram& cp, const Box& box);
BigM derive_big_m(const ChanceProgram& cp);

/// Exact mixed-integer model of an individual chance constraint. L1 and Linf
/// balls give a MILP; L2 adds one cone row (export only). Throws
/// PreconditionError for theta = 0 or a p-norm with A != 0.
MipModel build_individual_mip(const ChanceProgram& cp, const BigM& big_m);

/// Exact MILP of a joint chance constraint with right-hand side uncertainty.
MipModel build_joint_rhs_mip(const ChanceProgram& cp, const BigM& big_m);

/// Dispatches on the safety type.
MipModel build_exact_mip(const ChanceProgram& cp, const BigM& big_m);

/// Convex inner approximation with slopes kappa in [0,1]^N.
MipModel build_kappa_model(const ChanceProgram& cp, const Vector& kappa);

/// Worst-case CVaR program for an individual chance constraint.
MipModel build_cvar_lp_individual(const ChanceProgram& cp);

/// Worst-case CVaR program for a joint chance constraint with row weights w
/// (strictly positive, summing to one).
MipModel build_cvar_lp_joint(const ChanceProgram& cp, const Vector& w);

/// w_m proportional to 1 / ||b_m||_*.
Vector optimal_cvar_weights(const ChanceProgram& cp);

/// Worst-case value-at-risk of -b^T xi at level risk over the Wasserstein
/// ball, found by bisection on the threshold. Each candidate is tested with a
/// feasibility LP when N <= lp_sample_limit and with the equivalent sorted
/// partial-sum test otherwise.
double bonferroni_threshold(const TrainingSet& ts, const Vector& b, double b0, double risk, double theta,
                            const Norm& norm, int lp_sample_limit = 400);

struct BonferroniPlan {
    std::vector<double> risks;
    std::vector<double> thresholds; ///< +inf marks a row that cannot be satisfied
};

/// Splits epsilon evenly across the rows unless risks are given.
BonferroniPlan make_bonferroni_plan(const ChanceProgram& cp, std::optional<std::vector<double>> risks = {});

/// min c^T x  s.t.  a_m^T x <= b0_m - eta_m, x in X.
MipModel build_bonferroni_lp(const ChanceProgram& cp, const BonferroniPlan& plan);

/// Scenario MIP: every safety row holds on all but floor(eps N) samples.
MipModel build_classical_mip(const ChanceProgram& cp, double big_m);
MipModel build_classical_mip(const ChanceProgram& cp);

struct ExactOptions {
    SolveOptions solver;
    /// Re-solve 2K+1 restricted variants when A^T x = b at the optimum.
    bool emulate_strict = false;
    double strict_gap = 1e-6;
    /// Scale applied to the derived big-M (testing aid).
    double big_m_scale = 1.0;
};

/// Builds and solves the exact model, handling a collapsed normal A^T x = b.
/// Throws DegenerateNormalError when the collapse cannot be settled and
/// emulation is off.
SolveResult solve_exact(const ChanceProgram& cp, const ExactOptions& options = {});

/// Approximation methods that share the exact solve's reporting.
SolveResult solve_cvar(const ChanceProgram& cp, const std::optional<Vector>& w = {},
                       const SolveOptions& options = {});
SolveResult solve_bonferroni(const ChanceProgram& cp, const BonferroniPlan& plan, const SolveOptions& options = {});
SolveResult solve_classical(const ChanceProgram& cp, const SolveOptions& options = {});

} // namespace drcc
