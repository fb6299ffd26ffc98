#pragma once

#include "drcc/model.hpp"

#include <algorithm>
#include <cmath>
#include <span>

namespace drcc {

/// Closed halfspace {xi : offset >= normal^T xi}.
template <typename Scalar>
struct BasicHalfspace {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> normal;
    Scalar offset{};
};

using Halfspace = BasicHalfspace<double>;

namespace detail {

template <typename Derived>
typename Derived::Scalar lp_norm(const Eigen::MatrixBase<Derived>& v, double p) {
    using Scalar = typename Derived::Scalar;
    const Scalar scale = v.cwiseAbs().maxCoeff();
    if (scale == Scalar(0)) return Scalar(0);
    Scalar acc(0);
    for (Eigen::Index k = 0; k < v.size(); ++k) acc += std::pow(std::abs(v(k)) / scale, p);
    return scale * std::pow(acc, Scalar(1) / p);
}

} // namespace detail

/// Primal norm ||v||.
template <typename Derived>
typename Derived::Scalar norm_value(const Norm& norm, const Eigen::MatrixBase<Derived>& v) {
    if (v.size() == 0) return 0;
    switch (norm.kind) {
    case Norm::Kind::L1: return v.template lpNorm<1>();
    case Norm::Kind::L2: return v.norm();
    case Norm::Kind::Linf: return v.template lpNorm<Eigen::Infinity>();
    case Norm::Kind::Lp: return detail::lp_norm(v, norm.exponent());
    }
    return 0;
}

/// Dual norm ||v||_* = sup{u^T v : ||u|| <= 1}.
template <typename Derived>
typename Derived::Scalar dual_norm(const Norm& norm, const Eigen::MatrixBase<Derived>& v) {
    if (v.size() == 0) return 0;
    switch (norm.kind) {
    case Norm::Kind::L1: return v.template lpNorm<Eigen::Infinity>();
    case Norm::Kind::L2: return v.norm();
    case Norm::Kind::Linf: return v.template lpNorm<1>();
    case Norm::Kind::Lp: return detail::lp_norm(v, norm.dual_exponent());
    }
    return 0;
}

/// (b^T xi - a) / ||b||_*, i.e. the distance without the positive-part clamp.
template <typename Derived, typename Scalar>
Scalar signed_dist(const Eigen::MatrixBase<Derived>& point, const BasicHalfspace<Scalar>& h,
                   const Norm& norm) {
    const Scalar scale = dual_norm(norm, h.normal);
    if (!(scale > Scalar(0))) throw PreconditionError("halfspace normal must be nonzero");
    return (h.normal.dot(point) - h.offset) / scale;
}

template <typename Derived, typename Scalar>
Scalar dist_to_halfspace(const Eigen::MatrixBase<Derived>& point, const BasicHalfspace<Scalar>& h,
                         const Norm& norm) {
    return std::max(Scalar(0), signed_dist(point, h, norm));
}

/// Index of the halfspace with the smallest signed distance (lowest index on ties)
/// together with that signed distance.
template <typename Derived, typename Scalar>
std::pair<std::size_t, Scalar> nearest_halfspace(const Eigen::MatrixBase<Derived>& point,
                                                 std::span<const BasicHalfspace<Scalar>> hs,
                                                 const Norm& norm) {
    if (hs.empty()) throw PreconditionError("need at least one halfspace");
    std::size_t best = 0;
    Scalar best_value = signed_dist(point, hs[0], norm);
    for (std::size_t m = 1; m < hs.size(); ++m) {
        const Scalar value = signed_dist(point, hs[m], norm);
        if (value < best_value) {
            best = m;
            best_value = value;
        }
    }
    return {best, best_value};
}

/// min over m of the per-halfspace signed distances.
template <typename Derived, typename Scalar>
Scalar min_signed_dist(const Eigen::MatrixBase<Derived>& point,
                       std::span<const BasicHalfspace<Scalar>> hs, const Norm& norm) {
    return nearest_halfspace(point, hs, norm).second;
}

/// Distance to the union of the halfspaces, (min_m signed distance)^+.
template <typename Derived, typename Scalar>
Scalar dist_to_union(const Eigen::MatrixBase<Derived>& point,
                     std::span<const BasicHalfspace<Scalar>> hs, const Norm& norm) {
    return std::max(Scalar(0), min_signed_dist(point, hs, norm));
}

/// A closest point of the halfspace to `point`. Points already inside are
/// returned unchanged.
template <typename Derived, typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> project_onto(const Eigen::MatrixBase<Derived>& point,
                                                      const BasicHalfspace<Scalar>& h,
                                                      const Norm& norm) {
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    Vec result = point;
    const Scalar gap = h.normal.dot(point) - h.offset;
    if (!(gap > Scalar(0))) return result;
    const Scalar dist = gap / dual_norm(norm, h.normal);
    switch (norm.kind) {
    case Norm::Kind::L2:
        result -= (gap / h.normal.squaredNorm()) * h.normal;
        break;
    case Norm::Kind::L1: {
        // single-coordinate move along the largest |b_k|
        Eigen::Index k = 0;
        h.normal.cwiseAbs().maxCoeff(&k);
        result(k) -= gap / h.normal(k);
        break;
    }
    case Norm::Kind::Linf:
        result -= dist * h.normal.cwiseSign();
        break;
    case Norm::Kind::Lp: {
        // u_k = sign(b_k) |b_k|^(q-1) / ||b||_q^(q-1) attains b^T u = ||b||_q with ||u||_p = 1
        const double q = norm.dual_exponent();
        const Scalar bq = dual_norm(norm, h.normal);
        Vec u(h.normal.size());
        for (Eigen::Index k = 0; k < u.size(); ++k) {
            const Scalar bk = h.normal(k);
            u(k) = (bk > 0 ? 1 : (bk < 0 ? -1 : 0)) * std::pow(std::abs(bk) / bq, q - 1);
        }
        result -= dist * u;
        break;
    }
    }
    return result;
}

} // namespace drcc
