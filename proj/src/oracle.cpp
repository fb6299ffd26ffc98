#include "drcc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace drcc {

Halfspace unsafe_halfspace(const IndividualSafety& s, const Vector& x) {
    return {s.b - s.A.transpose() * x, s.a.dot(x) - s.b0};
}

std::vector<Halfspace> unsafe_halfspaces(const JointRhsSafety& s, const Vector& x) {
    std::vector<Halfspace> out;
    out.reserve(s.rows.size());
    for (const auto& r : s.rows) out.push_back({r.b, r.a.dot(x) - r.b0});
    return out;
}

std::vector<Halfspace> unsafe_halfspaces(const ChanceProgram& cp, const Vector& x) {
    if (cp.is_individual()) return {unsafe_halfspace(cp.individual(), x)};
    return unsafe_halfspaces(cp.joint(), x);
}

bool is_safe(const ChanceProgram& cp, const Vector& x, const Vector& xi) {
    for (const Halfspace& h : unsafe_halfspaces(cp, x)) {
        if (!(h.normal.dot(xi) > h.offset)) return false;
    }
    return true;
}

double partial_sum(std::span<const double> sorted, double ell) {
    const double n = static_cast<double>(sorted.size());
    if (!(ell >= 0.0 && ell <= n)) throw PreconditionError("partial sum length out of range");
    const double whole = std::floor(ell);
    const auto count = static_cast<std::size_t>(whole);
    double sum = 0.0;
    for (std::size_t i = 0; i < count; ++i) sum += sorted[i];
    const double frac = ell - whole;
    if (frac > 0.0) sum += frac * sorted[count];
    return sum;
}

namespace {

/// Distance to one halfspace; a zero normal means the halfspace is either
/// everything (distance 0) or empty (infinite distance).
double distance_to(const Vector& point, const Halfspace& h, const Norm& norm) {
    if (h.normal.cwiseAbs().maxCoeff() == 0.0) return h.offset >= 0.0 ? 0.0 : kInf;
    return dist_to_halfspace(point, h, norm);
}

std::pair<std::size_t, double> closest(const Vector& point, std::span<const Halfspace> hs, const Norm& norm) {
    std::size_t best = 0;
    double best_value = kInf;
    for (std::size_t m = 0; m < hs.size(); ++m) {
        const double d = distance_to(point, hs[m], norm);
        if (d < best_value) {
            best = m;
            best_value = d;
        }
    }
    return {best, best_value};
}

std::vector<int> ascending_order(const Vector& values) {
    std::vector<int> order(static_cast<std::size_t>(values.size()));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int l, int r) { return values(l) < values(r); });
    return order;
}

std::vector<double> sorted_values(const Vector& values) {
    std::vector<double> out(values.data(), values.data() + values.size());
    std::sort(out.begin(), out.end());
    return out;
}

void require_radius(double theta) {
    if (!(theta > 0.0)) throw PreconditionError("Wasserstein radius must be positive");
}

void require_risk(double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw PreconditionError("epsilon must lie strictly between 0 and 1");
}

FeasibilityReport partial_sum_test(const Vector& values, double theta, double epsilon) {
    const auto N = static_cast<double>(values.size());
    const std::vector<double> sorted = sorted_values(values);
    FeasibilityReport r;
    r.lhs = partial_sum(sorted, epsilon * N) / N;
    r.slack = r.lhs - theta;
    r.feasible = r.lhs >= theta;
    return r;
}

} // namespace

DistanceProfile distance_profile(const TrainingSet& ts, std::span<const Halfspace> unsafe, const Norm& norm) {
    if (unsafe.empty()) throw PreconditionError("need at least one unsafe halfspace");
    DistanceProfile p;
    p.distances.resize(ts.size());
    for (Eigen::Index i = 0; i < ts.size(); ++i) {
        double d = closest(ts.sample(i), unsafe, norm).second;
        if (d <= kZeroDistance) d = 0.0;
        p.distances(i) = d;
        if (d == 0.0) ++p.unsafe_count;
    }
    p.order = ascending_order(p.distances);
    return p;
}

Quantification worst_case_probability(const TrainingSet& ts, std::span<const Halfspace> unsafe, double theta,
                                      const Norm& norm) {
    require_radius(theta);
    const DistanceProfile profile = distance_profile(ts, unsafe, norm);
    const int N = static_cast<int>(ts.size());
    const double budget = theta * N;

    int j_star = 0;
    double used = 0.0;
    while (j_star < N) {
        const double next = profile.distances(profile.order[j_star]);
        if (used + next > budget) break;
        used += next;
        ++j_star;
    }
    double p_star = 0.0;
    while (j_star < N) {
        const double next = profile.distances(profile.order[j_star]);
        if (next >= 1e-15) {
            p_star = std::isfinite(next) ? (budget - used) / next : 0.0;
            break;
        }
        ++j_star;
    }

    Quantification out;
    WorstCaseDistribution& wcd = out.worst_case;
    wcd.j_star = j_star;
    wcd.saturated = j_star == N;
    wcd.p_star = wcd.saturated ? 0.0 : p_star;
    const double unit = 1.0 / N;
    auto moved = [&](int i) {
        const Vector point = ts.sample(i);
        const auto [m, d] = closest(point, unsafe, norm);
        if (d == 0.0 || !std::isfinite(d)) return point;
        return project_onto(point, unsafe[m], norm);
    };
    for (int k = 0; k < N; ++k) {
        const int i = profile.order[k];
        if (k < j_star) {
            wcd.support.push_back(moved(i));
            wcd.masses.push_back(unit);
        } else if (k == j_star && wcd.p_star > 0.0) {
            wcd.support.push_back(moved(i));
            wcd.masses.push_back(wcd.p_star * unit);
            wcd.support.push_back(ts.sample(i));
            wcd.masses.push_back((1.0 - wcd.p_star) * unit);
        } else {
            wcd.support.push_back(ts.sample(i));
            wcd.masses.push_back(unit);
        }
    }
    wcd.unsafe_mass = wcd.saturated ? 1.0 : (j_star + wcd.p_star) / N;
    out.probability = wcd.unsafe_mass;
    return out;
}

FeasibilityReport check_chance_feasible(const TrainingSet& ts, std::span<const Halfspace> unsafe, double theta,
                                        double epsilon, const Norm& norm) {
    require_radius(theta);
    require_risk(epsilon);
    return partial_sum_test(distance_profile(ts, unsafe, norm).distances, theta, epsilon);
}

FeasibilityReport check_cvar_feasible_individual(const TrainingSet& ts, const IndividualSafety& s, const Vector& x,
                                                 double theta, double epsilon, const Norm& norm) {
    require_radius(theta);
    require_risk(epsilon);
    const Halfspace h = unsafe_halfspace(s, x);
    if (!(dual_norm(norm, h.normal) > 0.0)) {
        throw PreconditionError("safety condition has a zero normal (A^T x = b) at this decision");
    }
    Vector values(ts.size());
    for (Eigen::Index i = 0; i < ts.size(); ++i) values(i) = signed_dist(ts.sample(i), h, norm);
    return partial_sum_test(values, theta, epsilon);
}

FeasibilityReport check_cvar_feasible_joint(const TrainingSet& ts, const JointRhsSafety& s, const Vector& x,
                                            double theta, double epsilon, const Norm& norm,
                                            const std::optional<Vector>& weights) {
    require_radius(theta);
    require_risk(epsilon);
    const std::vector<Halfspace> hs = unsafe_halfspaces(s, x);
    const auto M = static_cast<Eigen::Index>(hs.size());
    // per-row factor multiplying the signed distance
    Vector factor = Vector::Ones(M);
    if (weights) {
        if (weights->size() != M) throw PreconditionError("one weight per joint row is required");
        if ((weights->array() <= 0.0).any()) throw PreconditionError("weights must be strictly positive");
        Vector scaled(M);
        for (Eigen::Index m = 0; m < M; ++m) scaled(m) = (*weights)(m) * dual_norm(norm, hs[m].normal);
        factor = scaled / scaled.maxCoeff();
    }
    Vector values(ts.size());
    for (Eigen::Index i = 0; i < ts.size(); ++i) {
        double best = kInf;
        for (Eigen::Index m = 0; m < M; ++m) {
            best = std::min(best, factor(m) * signed_dist(ts.sample(i), hs[m], norm));
        }
        values(i) = best;
    }
    return partial_sum_test(values, theta, epsilon);
}

} // namespace drcc
