#pragma once

#include "drcc/geometry.hpp"
#include "drcc/model.hpp"

#include <optional>
#include <span>
#include <vector>

namespace drcc {

/// Samples closer than this to the unsafe set count as unsafe.
inline constexpr double kZeroDistance = 1e-12;

/// Distances of the samples to the unsafe set, with the ascending order.
struct DistanceProfile {
    Vector distances;
    std::vector<int> order;  ///< ascending distance, ties by sample index
    int unsafe_count = 0;    ///< samples at distance zero
};

/// Discrete worst-case distribution: support points with their masses.
struct WorstCaseDistribution {
    std::vector<Vector> support;
    std::vector<double> masses;
    double unsafe_mass = 0.0;
    int j_star = 0;
    double p_star = 0.0;
    /// True when the budget moves every sample into the unsafe set.
    bool saturated = false;
};

struct Quantification {
    double probability = 0.0;
    WorstCaseDistribution worst_case;
};

struct FeasibilityReport {
    bool feasible = false;
    double lhs = 0.0;
    double slack = 0.0; ///< lhs - theta
};

/// Unsafe set {xi : (A xi + a)^T x >= b^T xi + b0} as a single halfspace.
Halfspace unsafe_halfspace(const IndividualSafety& s, const Vector& x);
/// Unsafe set of a joint safety condition as a union of M halfspaces.
std::vector<Halfspace> unsafe_halfspaces(const JointRhsSafety& s, const Vector& x);
std::vector<Halfspace> unsafe_halfspaces(const ChanceProgram& cp, const Vector& x);

/// True when the scenario satisfies every strict safety inequality at x.
bool is_safe(const ChanceProgram& cp, const Vector& x, const Vector& xi);

/// Sum of the floor(ell) first values plus the fractional part times the next one.
double partial_sum(std::span<const double> sorted, double ell);

DistanceProfile distance_profile(const TrainingSet& ts, std::span<const Halfspace> unsafe, const Norm& norm);

/// Largest probability of the unsafe union over the Wasserstein ball, with a
/// distribution attaining it.
Quantification worst_case_probability(const TrainingSet& ts, std::span<const Halfspace> unsafe, double theta,
                                      const Norm& norm);

/// Deterministic test of the ambiguous chance constraint:
/// (1/N) partial_sum(sorted distances, eps N) >= theta.
FeasibilityReport check_chance_feasible(const TrainingSet& ts, std::span<const Halfspace> unsafe, double theta,
                                        double epsilon, const Norm& norm);

/// Worst-case CVaR test for an individual condition, based on signed distances.
FeasibilityReport check_cvar_feasible_individual(const TrainingSet& ts, const IndividualSafety& s, const Vector& x,
                                                 double theta, double epsilon, const Norm& norm);

/// Worst-case CVaR test for a joint condition. Without weights the rows are
/// scaled by the inverse dual norms of their normals (minimum signed distance).
FeasibilityReport check_cvar_feasible_joint(const TrainingSet& ts, const JointRhsSafety& s, const Vector& x,
                                            double theta, double epsilon, const Norm& norm,
                                            const std::optional<Vector>& weights = std::nullopt);

} // namespace drcc
