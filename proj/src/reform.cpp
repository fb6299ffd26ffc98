#include "drcc/reform.hpp"

#include "drcc/geometry.hpp"
#include "drcc/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace drcc {
namespace {

using Terms = std::vector<std::pair<int, double>>;

std::string num(double v) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.17g", v);
    return buffer;
}

void require_positive_radius(const ChanceProgram& cp) {
    if (!(cp.ball.radius > 0.0)) {
        throw PreconditionError(
            "the exact reformulation needs theta > 0; for theta = 0 use the classical scenario model");
    }
}

/// Margin of sample i, e_i(x) = constant + gradient^T x, for the individual condition.
struct Affine {
    double constant;
    Vector gradient;
};

Affine individual_margin(const IndividualSafety& s, const Vector& xi) {
    return {s.b.dot(xi) + s.b0, -(s.A * xi + s.a)};
}

/// (b_m^T xi + b0_m - a_m^T x) / ||b_m||_*
Affine joint_margin(const JointRow& r, const Vector& xi, const Norm& norm) {
    const double scale = dual_norm(norm, r.b);
    return {(r.b.dot(xi) + r.b0) / scale, -r.a / scale};
}

/// Largest |constant + gradient^T x| over the box.
double abs_bound(const Affine& f, const Box& box) {
    double lo = f.constant;
    double hi = f.constant;
    for (Eigen::Index l = 0; l < f.gradient.size(); ++l) {
        const double u = f.gradient(l) * box.lo(l);
        const double v = f.gradient(l) * box.hi(l);
        lo += std::min(u, v);
        hi += std::max(u, v);
    }
    return std::max(std::abs(lo), std::abs(hi));
}

Terms affine_terms(const std::vector<int>& xs, const Vector& coefficients, double scale = 1.0) {
    Terms terms;
    for (std::size_t l = 0; l < xs.size(); ++l) {
        const double c = scale * coefficients(static_cast<Eigen::Index>(l));
        if (c != 0.0) terms.emplace_back(xs[l], c);
    }
    return terms;
}

/// Adds x with its costs (bounded by the box when given) and the rows G x <= h.
std::vector<int> add_decisions(MipModel& m, const ChanceProgram& cp, const Box* box) {
    std::vector<int> xs;
    for (Eigen::Index l = 0; l < cp.num_decisions(); ++l) {
        const double lo = box ? box->lo(l) : -kInf;
        const double hi = box ? box->hi(l) : kInf;
        xs.push_back(m.add_variable("x" + std::to_string(l + 1), lo, hi, VarRole::Decision, false, cp.cost(l)));
    }
    for (Eigen::Index r = 0; r < cp.feasible.G.rows(); ++r) {
        m.add_row("g" + std::to_string(r + 1), affine_terms(xs, cp.feasible.G.row(r).transpose()), Sense::LessEqual,
                  cp.feasible.h(r), RowRole::Polytope);
    }
    return xs;
}

/// Linear expression (terms + constant) that upper bounds ||b - A^T x||_* at
/// every feasible point and equals it at optimality.
struct NormBound {
    Terms terms;
    double constant = 0.0;
};

NormBound add_dual_norm_epigraph(MipModel& m, const IndividualSafety& s, const Norm& norm,
                                 const std::vector<int>& xs) {
    NormBound out;
    const Eigen::Index K = s.b.size();
    if (s.A.cwiseAbs().maxCoeff() == 0.0 || s.A.size() == 0) {
        out.constant = dual_norm(norm, s.b);
        return out;
    }
    // component k of b - A^T x is b_k - sum_l A(l,k) x_l
    auto column = [&](Eigen::Index k) { return affine_terms(xs, s.A.col(k)); };
    switch (norm.kind) {
    case Norm::Kind::L1: {
        const int beta = m.add_variable("beta", 0.0, kInf, VarRole::Auxiliary);
        for (Eigen::Index k = 0; k < K; ++k) {
            Terms up = column(k);
            up.emplace_back(beta, 1.0);
            m.add_row("nu" + std::to_string(k + 1), up, Sense::GreaterEqual, s.b(k), RowRole::Auxiliary);
            Terms down = affine_terms(xs, s.A.col(k), -1.0);
            down.emplace_back(beta, 1.0);
            m.add_row("nl" + std::to_string(k + 1), down, Sense::GreaterEqual, -s.b(k), RowRole::Auxiliary);
        }
        out.terms.emplace_back(beta, 1.0);
        break;
    }
    case Norm::Kind::Linf: {
        for (Eigen::Index k = 0; k < K; ++k) {
            const int u = m.add_variable("u" + std::to_string(k + 1), 0.0, kInf, VarRole::Auxiliary);
            Terms up = column(k);
            up.emplace_back(u, 1.0);
            m.add_row("nu" + std::to_string(k + 1), up, Sense::GreaterEqual, s.b(k), RowRole::Auxiliary);
            Terms down = affine_terms(xs, s.A.col(k), -1.0);
            down.emplace_back(u, 1.0);
            m.add_row("nl" + std::to_string(k + 1), down, Sense::GreaterEqual, -s.b(k), RowRole::Auxiliary);
            out.terms.emplace_back(u, 1.0);
        }
        break;
    }
    case Norm::Kind::L2: {
        const int beta = m.add_variable("beta", 0.0, kInf, VarRole::Auxiliary);
        std::vector<int> body;
        for (Eigen::Index k = 0; k < K; ++k) {
            const int v = m.add_variable("v" + std::to_string(k + 1), -kInf, kInf, VarRole::Auxiliary);
            Terms row = column(k);
            row.emplace_back(v, 1.0);
            m.add_row("nv" + std::to_string(k + 1), row, Sense::Equal, s.b(k), RowRole::Auxiliary);
            body.push_back(v);
        }
        m.add_cone("cone", beta, body);
        out.terms.emplace_back(beta, 1.0);
        break;
    }
    case Norm::Kind::Lp:
        throw PreconditionError("a " + norm.name() +
                                " ball with decision-dependent normal has no linear or second-order cone model");
    }
    return out;
}

void note_big_m(MipModel& m, const BigM& big_m) {
    m.note("big_m", num(big_m.value));
    m.note("big_m_expression_bound", num(big_m.expression_bound));
    m.note("big_m_threshold_bound", num(big_m.threshold_bound));
    m.note("big_m_margin", "2");
}

std::vector<double> joint_scales(const ChanceProgram& cp) {
    std::vector<double> out;
    for (const auto& r : cp.joint().rows) out.push_back(dual_norm(cp.ball.norm, r.b));
    return out;
}

} // namespace

BigM derive_big_m(const ChanceProgram& cp, const Box& box) {
    BigM out;
    out.box = box;
    double bound = 0.0;
    const TrainingSet& ts = cp.ball.center;
    for (Eigen::Index i = 0; i < ts.size(); ++i) {
        const Vector xi = ts.sample(i);
        if (cp.is_individual()) {
            bound = std::max(bound, abs_bound(individual_margin(cp.individual(), xi), box));
        } else {
            for (const auto& r : cp.joint().rows) bound = std::max(bound, abs_bound(joint_margin(r, xi, cp.ball.norm), box));
        }
    }
    if (!(bound > 0.0)) bound = 1.0;
    out.expression_bound = bound;
    // the concave threshold function peaks at some margin, so t <= max margin
    out.threshold_bound = bound;
    out.value = 2.0 * (out.expression_bound + out.threshold_bound);
    return out;
}

BigM derive_big_m(const ChanceProgram& cp) {
    return derive_big_m(cp, validate_bounded(cp.feasible));
}

MipModel build_individual_mip(const ChanceProgram& cp, const BigM& big_m) {
    require_positive_radius(cp);
    if (!cp.is_individual()) throw PreconditionError("individual model needs an individual safety condition");
    const auto& s = cp.individual();
    const TrainingSet& ts = cp.ball.center;
    const auto N = static_cast<int>(ts.size());
    const double eps_n = cp.epsilon * N;
    const double theta_n = cp.ball.radius * N;
    const double M = big_m.value;
    const double cap = big_m.expression_bound;

    MipModel m;
    m.name = "individual";
    const std::vector<int> xs = add_decisions(m, cp, &big_m.box);
    std::vector<int> slack(N), indicator(N);
    for (int i = 0; i < N; ++i) slack[i] = m.add_variable("s" + std::to_string(i + 1), 0.0, cap, VarRole::Slack);
    const int t = m.add_variable("t", 0.0, big_m.threshold_bound, VarRole::Threshold);
    for (int i = 0; i < N; ++i) {
        indicator[i] = m.add_variable("q" + std::to_string(i + 1), 0.0, 1.0, VarRole::Indicator, true);
    }
    const NormBound norm_bound = add_dual_norm_epigraph(m, s, cp.ball.norm, xs);

    Terms risk{{t, eps_n}};
    for (int i = 0; i < N; ++i) risk.emplace_back(slack[i], -1.0);
    for (const auto& [j, c] : norm_bound.terms) risk.emplace_back(j, -theta_n * c);
    m.add_row("risk", risk, Sense::GreaterEqual, theta_n * norm_bound.constant);

    for (int i = 0; i < N; ++i) {
        const Affine e = individual_margin(s, ts.sample(i));
        Terms on = affine_terms(xs, e.gradient);
        on.emplace_back(indicator[i], M);
        on.emplace_back(t, -1.0);
        on.emplace_back(slack[i], 1.0);
        m.add_row("on" + std::to_string(i + 1), on, Sense::GreaterEqual, -e.constant);
        m.add_row("off" + std::to_string(i + 1), {{t, 1.0}, {slack[i], -1.0}, {indicator[i], M}}, Sense::LessEqual, M);
    }
    note_big_m(m, big_m);
    return m;
}

MipModel build_joint_rhs_mip(const ChanceProgram& cp, const BigM& big_m) {
    require_positive_radius(cp);
    if (!cp.is_joint()) throw PreconditionError("joint model needs a joint safety condition");
    const TrainingSet& ts = cp.ball.center;
    const auto N = static_cast<int>(ts.size());
    const double M = big_m.value;
    const double cap = big_m.expression_bound;
    const auto& rows = cp.joint().rows;

    MipModel m;
    m.name = "joint";
    const std::vector<int> xs = add_decisions(m, cp, &big_m.box);
    std::vector<int> slack(N), dist(N), indicator(N);
    for (int i = 0; i < N; ++i) slack[i] = m.add_variable("s" + std::to_string(i + 1), 0.0, cap, VarRole::Slack);
    const int t = m.add_variable("t", 0.0, big_m.threshold_bound, VarRole::Threshold);
    for (int i = 0; i < N; ++i) dist[i] = m.add_variable("p" + std::to_string(i + 1), -cap, cap, VarRole::Distance);
    for (int i = 0; i < N; ++i) {
        indicator[i] = m.add_variable("q" + std::to_string(i + 1), 0.0, 1.0, VarRole::Indicator, true);
    }

    Terms risk{{t, cp.epsilon * N}};
    for (int i = 0; i < N; ++i) risk.emplace_back(slack[i], -1.0);
    m.add_row("risk", risk, Sense::GreaterEqual, cp.ball.radius * N);
    for (int i = 0; i < N; ++i) {
        const std::string id = std::to_string(i + 1);
        m.add_row("on" + id, {{dist[i], 1.0}, {indicator[i], M}, {t, -1.0}, {slack[i], 1.0}}, Sense::GreaterEqual, 0.0);
        m.add_row("off" + id, {{t, 1.0}, {slack[i], -1.0}, {indicator[i], M}}, Sense::LessEqual, M);
    }
    for (int i = 0; i < N; ++i) {
        for (std::size_t r = 0; r < rows.size(); ++r) {
            const Affine e = joint_margin(rows[r], ts.sample(i), cp.ball.norm);
            // p_i <= constant + gradient^T x
            Terms terms = affine_terms(xs, e.gradient, -1.0);
            terms.emplace_back(dist[i], 1.0);
            m.add_row("d" + std::to_string(i + 1) + "_" + std::to_string(r + 1), terms, Sense::LessEqual, e.constant);
        }
    }
    note_big_m(m, big_m);
    return m;
}

MipModel build_exact_mip(const ChanceProgram& cp, const BigM& big_m) {
    return cp.is_individual() ? build_individual_mip(cp, big_m) : build_joint_rhs_mip(cp, big_m);
}

MipModel build_kappa_model(const ChanceProgram& cp, const Vector& kappa) {
    require_positive_radius(cp);
    const TrainingSet& ts = cp.ball.center;
    const auto N = static_cast<int>(ts.size());
    if (kappa.size() != N) throw PreconditionError("kappa needs one entry per sample");
    if ((kappa.array() < 0.0).any() || (kappa.array() > 1.0).any()) {
        throw PreconditionError("kappa entries must lie in [0, 1]");
    }

    MipModel m;
    m.name = "kappa";
    const std::vector<int> xs = add_decisions(m, cp, nullptr);
    std::vector<int> slack(N);
    for (int i = 0; i < N; ++i) slack[i] = m.add_variable("s" + std::to_string(i + 1), 0.0, kInf, VarRole::Slack);
    const int t = m.add_variable("t", -kInf, kInf, VarRole::Threshold);

    Terms risk{{t, cp.epsilon * N}};
    for (int i = 0; i < N; ++i) risk.emplace_back(slack[i], -1.0);
    const double theta_n = cp.ball.radius * N;

    if (cp.is_individual()) {
        const auto& s = cp.individual();
        const NormBound norm_bound = add_dual_norm_epigraph(m, s, cp.ball.norm, xs);
        for (const auto& [j, c] : norm_bound.terms) risk.emplace_back(j, -theta_n * c);
        m.add_row("risk", risk, Sense::GreaterEqual, theta_n * norm_bound.constant);
        for (int i = 0; i < N; ++i) {
            const Affine e = individual_margin(s, ts.sample(i));
            Terms row = affine_terms(xs, e.gradient, kappa(i));
            row.emplace_back(t, -1.0);
            row.emplace_back(slack[i], 1.0);
            m.add_row("k" + std::to_string(i + 1), row, Sense::GreaterEqual, -kappa(i) * e.constant);
        }
    } else {
        m.add_row("risk", risk, Sense::GreaterEqual, theta_n);
        const auto& rows = cp.joint().rows;
        for (int i = 0; i < N; ++i) {
            for (std::size_t r = 0; r < rows.size(); ++r) {
                const Affine e = joint_margin(rows[r], ts.sample(i), cp.ball.norm);
                Terms row = affine_terms(xs, e.gradient, kappa(i));
                row.emplace_back(t, -1.0);
                row.emplace_back(slack[i], 1.0);
                m.add_row("k" + std::to_string(i + 1) + "_" + std::to_string(r + 1), row, Sense::GreaterEqual,
                          -kappa(i) * e.constant);
            }
        }
    }
    return m;
}

MipModel build_cvar_lp_individual(const ChanceProgram& cp) {
    require_positive_radius(cp);
    if (!cp.is_individual()) throw PreconditionError("individual CVaR model needs an individual safety condition");
    const auto& s = cp.individual();
    const TrainingSet& ts = cp.ball.center;
    const auto N = static_cast<int>(ts.size());

    MipModel m;
    m.name = "cvar";
    const std::vector<int> xs = add_decisions(m, cp, nullptr);
    std::vector<int> alpha(N);
    for (int i = 0; i < N; ++i) alpha[i] = m.add_variable("a" + std::to_string(i + 1), 0.0, kInf, VarRole::Slack);
    const int tau = m.add_variable("tau", -kInf, kInf, VarRole::Threshold);
    const NormBound norm_bound = add_dual_norm_epigraph(m, s, cp.ball.norm, xs);

    // eps tau + theta beta + (1/N) sum alpha <= 0
    Terms cvar{{tau, cp.epsilon}};
    for (int i = 0; i < N; ++i) cvar.emplace_back(alpha[i], 1.0 / N);
    for (const auto& [j, c] : norm_bound.terms) cvar.emplace_back(j, cp.ball.radius * c);
    m.add_row("cvar", cvar, Sense::LessEqual, -cp.ball.radius * norm_bound.constant);
    for (int i = 0; i < N; ++i) {
        const Affine e = individual_margin(s, ts.sample(i));
        // alpha_i >= -e_i(x) - tau
        Terms row = affine_terms(xs, e.gradient);
        row.emplace_back(alpha[i], 1.0);
        row.emplace_back(tau, 1.0);
        m.add_row("l" + std::to_string(i + 1), row, Sense::GreaterEqual, -e.constant);
    }
    return m;
}

Vector optimal_cvar_weights(const ChanceProgram& cp) {
    const std::vector<double> scales = joint_scales(cp);
    Vector w(static_cast<Eigen::Index>(scales.size()));
    for (std::size_t r = 0; r < scales.size(); ++r) w(static_cast<Eigen::Index>(r)) = 1.0 / scales[r];
    return w / w.sum();
}

MipModel build_cvar_lp_joint(const ChanceProgram& cp, const Vector& w) {
    require_positive_radius(cp);
    if (!cp.is_joint()) throw PreconditionError("joint CVaR model needs a joint safety condition");
    const auto& rows = cp.joint().rows;
    const auto M = static_cast<Eigen::Index>(rows.size());
    if (w.size() != M) throw PreconditionError("one weight per joint row is required");
    if ((w.array() <= 0.0).any() || std::abs(w.sum() - 1.0) > 1e-9) {
        throw PreconditionError("weights must be strictly positive and sum to one");
    }
    const TrainingSet& ts = cp.ball.center;
    const auto N = static_cast<int>(ts.size());
    const std::vector<double> scales = joint_scales(cp);
    double beta = 0.0;
    for (Eigen::Index r = 0; r < M; ++r) beta = std::max(beta, w(r) * scales[r]);

    MipModel m;
    m.name = "cvar_joint";
    const std::vector<int> xs = add_decisions(m, cp, nullptr);
    std::vector<int> alpha(N);
    for (int i = 0; i < N; ++i) alpha[i] = m.add_variable("a" + std::to_string(i + 1), 0.0, kInf, VarRole::Slack);
    const int tau = m.add_variable("tau", -kInf, kInf, VarRole::Threshold);
    Terms cvar{{tau, cp.epsilon}};
    for (int i = 0; i < N; ++i) cvar.emplace_back(alpha[i], 1.0 / N);
    m.add_row("cvar", cvar, Sense::LessEqual, -cp.ball.radius * beta);
    for (int i = 0; i < N; ++i) {
        const Vector xi = ts.sample(i);
        for (Eigen::Index r = 0; r < M; ++r) {
            // alpha_i >= w_m (a_m^T x - b_m^T xi - b0_m) - tau
            Terms row = affine_terms(xs, rows[r].a, -w(r));
            row.emplace_back(alpha[i], 1.0);
            row.emplace_back(tau, 1.0);
            m.add_row("l" + std::to_string(i + 1) + "_" + std::to_string(r + 1), row, Sense::GreaterEqual,
                      -w(r) * (rows[r].b.dot(xi) + rows[r].b0));
        }
    }
    m.note("cvar_beta", num(beta));
    return m;
}

namespace {

bool threshold_feasible_lp(const TrainingSet& ts, const Vector& b, double risk, double theta, double scale,
                           double eta) {
    const auto N = static_cast<int>(ts.size());
    MipModel m;
    std::vector<int> alpha(N), w(N);
    for (int i = 0; i < N; ++i) alpha[i] = m.add_variable("a" + std::to_string(i + 1), 0.0, kInf, VarRole::Auxiliary);
    const int beta = m.add_variable("beta", 0.0, kInf, VarRole::Auxiliary);
    for (int i = 0; i < N; ++i) w[i] = m.add_variable("w" + std::to_string(i + 1), 0.0, kInf, VarRole::Auxiliary);
    Terms budget{{beta, theta}};
    for (int i = 0; i < N; ++i) budget.emplace_back(alpha[i], 1.0 / N);
    m.add_row("budget", budget, Sense::LessEqual, risk);
    for (int i = 0; i < N; ++i) {
        const double gap = eta + b.dot(ts.sample(i));
        // alpha_i >= 1 - w_i (eta + b^T xi_i)
        m.add_row("h" + std::to_string(i + 1), {{alpha[i], 1.0}, {w[i], gap}}, Sense::GreaterEqual, 1.0);
        m.add_row("n" + std::to_string(i + 1), {{beta, 1.0}, {w[i], -scale}}, Sense::GreaterEqual, 0.0);
    }
    return simplex_solve(m.relaxation()).status == LpStatus::Optimal;
}

bool threshold_feasible_sorted(const TrainingSet& ts, const Vector& b, double risk, double theta, double scale,
                               double eta) {
    std::vector<double> dist(static_cast<std::size_t>(ts.size()));
    for (Eigen::Index i = 0; i < ts.size(); ++i) dist[i] = std::max(0.0, eta + b.dot(ts.sample(i))) / scale;
    std::sort(dist.begin(), dist.end());
    const double n = static_cast<double>(ts.size());
    return partial_sum(dist, risk * n) / n >= theta;
}

} // namespace

double bonferroni_threshold(const TrainingSet& ts, const Vector& b, double b0, double risk, double theta,
                            const Norm& norm, int lp_sample_limit) {
    (void)b0; // the threshold does not depend on the row's offset
    if (!(risk > 0.0 && risk < 1.0)) throw PreconditionError("row risk must lie strictly between 0 and 1");
    if (!(theta > 0.0)) throw PreconditionError("Wasserstein radius must be positive");
    const double scale = dual_norm(norm, b);
    if (!(scale > 0.0)) throw PreconditionError("row normal must be nonzero");
    const auto N = static_cast<double>(ts.size());
    const bool use_lp = ts.size() <= lp_sample_limit;
    auto feasible = [&](double eta) {
        return use_lp ? threshold_feasible_lp(ts, b, risk, theta, scale, eta)
                      : threshold_feasible_sorted(ts, b, risk, theta, scale, eta);
    };

    double low = kInf;
    double high = -kInf;
    for (Eigen::Index i = 0; i < ts.size(); ++i) {
        const double v = -b.dot(ts.sample(i));
        low = std::min(low, v);
        high = std::max(high, v);
    }
    const double reach = 2.0 * theta * N * scale / risk;
    low -= reach;
    high += reach;
    if (feasible(low)) throw Error("threshold bracket failure: lower end " + num(low) + " is already feasible");
    if (!feasible(high)) throw Error("threshold bracket failure: upper end " + num(high) + " is infeasible");
    for (int iter = 0; iter < 200 && high - low > 1e-8; ++iter) {
        const double mid = 0.5 * (low + high);
        (feasible(mid) ? high : low) = mid;
    }
    return high;
}

BonferroniPlan make_bonferroni_plan(const ChanceProgram& cp, std::optional<std::vector<double>> risks) {
    if (!cp.is_joint()) throw PreconditionError("the Bonferroni approximation needs a joint safety condition");
    const auto& rows = cp.joint().rows;
    BonferroniPlan plan;
    if (risks) {
        plan.risks = *risks;
        if (plan.risks.size() != rows.size()) throw PreconditionError("one risk per joint row is required");
        double total = 0.0;
        for (double r : plan.risks) {
            if (r < 0.0) throw PreconditionError("row risks must be nonnegative");
            total += r;
        }
        if (std::abs(total - cp.epsilon) > 1e-12) throw PreconditionError("row risks must sum to epsilon");
    } else {
        plan.risks.assign(rows.size(), cp.epsilon / static_cast<double>(rows.size()));
    }
    for (std::size_t r = 0; r < rows.size(); ++r) {
        plan.thresholds.push_back(plan.risks[r] > 0.0
                                      ? bonferroni_threshold(cp.ball.center, rows[r].b, rows[r].b0, plan.risks[r],
                                                             cp.ball.radius, cp.ball.norm)
                                      : kInf);
    }
    return plan;
}

MipModel build_bonferroni_lp(const ChanceProgram& cp, const BonferroniPlan& plan) {
    if (!cp.is_joint()) throw PreconditionError("the Bonferroni approximation needs a joint safety condition");
    const auto& rows = cp.joint().rows;
    if (plan.thresholds.size() != rows.size()) throw PreconditionError("plan does not match the joint rows");
    MipModel m;
    m.name = "bonferroni";
    const std::vector<int> xs = add_decisions(m, cp, nullptr);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const std::string name = "b" + std::to_string(r + 1);
        if (std::isinf(plan.thresholds[r])) {
            m.add_row(name, {}, Sense::LessEqual, -1.0);
            continue;
        }
        m.add_row(name, affine_terms(xs, rows[r].a), Sense::LessEqual, rows[r].b0 - plan.thresholds[r]);
        m.note("eta" + std::to_string(r + 1), num(plan.thresholds[r]));
    }
    return m;
}

MipModel build_classical_mip(const ChanceProgram& cp, double big_m) {
    const TrainingSet& ts = cp.ball.center;
    const auto N = static_cast<int>(ts.size());
    MipModel m;
    m.name = "classical";
    const Box box = validate_bounded(cp.feasible);
    const std::vector<int> xs = add_decisions(m, cp, &box);
    std::vector<int> y(N);
    for (int i = 0; i < N; ++i) y[i] = m.add_variable("y" + std::to_string(i + 1), 0.0, 1.0, VarRole::Indicator, true);
    for (int i = 0; i < N; ++i) {
        const Vector xi = ts.sample(i);
        if (cp.is_individual()) {
            // e_i(x) >= -M y_i
            const Affine e = individual_margin(cp.individual(), xi);
            Terms row = affine_terms(xs, e.gradient);
            row.emplace_back(y[i], big_m);
            m.add_row("c" + std::to_string(i + 1), row, Sense::GreaterEqual, -e.constant);
        } else {
            const auto& rows = cp.joint().rows;
            for (std::size_t r = 0; r < rows.size(); ++r) {
                // a_m^T x <= b_m^T xi + b0_m + M y_i
                Terms row = affine_terms(xs, rows[r].a);
                row.emplace_back(y[i], -big_m);
                m.add_row("c" + std::to_string(i + 1) + "_" + std::to_string(r + 1), row, Sense::LessEqual,
                          rows[r].b.dot(xi) + rows[r].b0);
            }
        }
    }
    Terms budget;
    for (int i = 0; i < N; ++i) budget.emplace_back(y[i], 1.0);
    m.add_row("budget", budget, Sense::LessEqual, std::floor(cp.epsilon * N + 1e-9));
    m.note("big_m", num(big_m));
    return m;
}

MipModel build_classical_mip(const ChanceProgram& cp) {
    const Box box = validate_bounded(cp.feasible);
    const TrainingSet& ts = cp.ball.center;
    double worst = 0.0;
    for (Eigen::Index i = 0; i < ts.size(); ++i) {
        const Vector xi = ts.sample(i);
        if (cp.is_individual()) {
            worst = std::max(worst, abs_bound(individual_margin(cp.individual(), xi), box));
        } else {
            for (const auto& r : cp.joint().rows) {
                worst = std::max(worst, abs_bound({r.b.dot(xi) + r.b0, -r.a}, box));
            }
        }
    }
    return build_classical_mip(cp, 2.0 * std::max(1.0, worst));
}

namespace {

void note_boundary(const ChanceProgram& cp, SolveResult& result) {
    if (!result.has_solution()) return;
    const TrainingSet& ts = cp.ball.center;
    int on_boundary = 0;
    for (Eigen::Index i = 0; i < ts.size(); ++i) {
        for (const Halfspace& h : unsafe_halfspaces(cp, result.x)) {
            const double gap = h.normal.dot(ts.sample(i)) - h.offset;
            if (std::abs(gap) <= 1e-9 * std::max(1.0, std::abs(h.offset))) {
                ++on_boundary;
                break;
            }
        }
    }
    result.diagnostics.emplace_back("samples_on_safety_boundary", std::to_string(on_boundary));
}

std::vector<std::string> strict_variants(Eigen::Index K) {
    std::vector<std::string> out;
    for (Eigen::Index k = 1; k <= K; ++k) {
        out.push_back("(A^T x)_" + std::to_string(k) + " >= b_" + std::to_string(k) + " + delta");
        out.push_back("(A^T x)_" + std::to_string(k) + " <= b_" + std::to_string(k) + " - delta");
    }
    out.push_back("A^T x = b and a^T x <= b0 - delta");
    return out;
}

} // namespace

SolveResult solve_exact(const ChanceProgram& cp, const ExactOptions& options) {
    require_positive_radius(cp);
    BigM big_m = derive_big_m(cp);
    big_m.value *= options.big_m_scale;
    const MipModel model = build_exact_mip(cp, big_m);
    SolveResult result = solve_mip(model, options.solver);
    if (!cp.is_individual() || !result.has_solution()) {
        note_boundary(cp, result);
        return result;
    }

    const auto& s = cp.individual();
    const Vector normal = s.b - s.A.transpose() * result.x;
    const double scale = std::max(1.0, dual_norm(cp.ball.norm, s.b));
    if (dual_norm(cp.ball.norm, normal) > 1e-9 * scale) {
        note_boundary(cp, result);
        return result;
    }
    if (s.a.dot(result.x) < s.b0) {
        result.diagnostics.emplace_back("collapsed_normal", "every scenario is safe");
        return result;
    }
    const Eigen::Index K = s.b.size();
    if (!options.emulate_strict) {
        throw DegenerateNormalError("A^T x = b at the optimum and a^T x >= b0; solve the restricted variants",
                                    strict_variants(K));
    }

    const double delta = options.strict_gap;
    const std::vector<int> xs = model.indices(VarRole::Decision);
    std::optional<SolveResult> best;
    int best_variant = -1;
    for (Eigen::Index v = 0; v <= 2 * K; ++v) {
        MipModel variant = model;
        if (v < 2 * K) {
            const Eigen::Index k = v / 2;
            const bool above = v % 2 == 0;
            variant.add_row("strict", affine_terms(xs, s.A.col(k)), above ? Sense::GreaterEqual : Sense::LessEqual,
                            above ? s.b(k) + delta : s.b(k) - delta, RowRole::Auxiliary);
        } else {
            for (Eigen::Index k = 0; k < K; ++k) {
                variant.add_row("flat" + std::to_string(k + 1), affine_terms(xs, s.A.col(k)), Sense::Equal, s.b(k),
                                RowRole::Auxiliary);
            }
            variant.add_row("strict", affine_terms(xs, s.a), Sense::LessEqual, s.b0 - delta, RowRole::Auxiliary);
        }
        SolveResult r = solve_mip(variant, options.solver);
        if (r.status != SolveStatus::Optimal) continue;
        if (!best || r.objective < best->objective) {
            best = std::move(r);
            best_variant = static_cast<int>(v);
        }
    }
    if (!best) {
        SolveResult none;
        none.status = SolveStatus::Infeasible;
        none.diagnostics = model.diagnostics;
        none.diagnostics.emplace_back("strict_variants", "all infeasible");
        return none;
    }
    best->diagnostics.emplace_back("strict_variant", strict_variants(K)[static_cast<std::size_t>(best_variant)]);
    note_boundary(cp, *best);
    return *best;
}

SolveResult solve_cvar(const ChanceProgram& cp, const std::optional<Vector>& w, const SolveOptions& options) {
    if (cp.is_individual()) return solve_lp(build_cvar_lp_individual(cp), options);
    return solve_lp(build_cvar_lp_joint(cp, w ? *w : optimal_cvar_weights(cp)), options);
}

SolveResult solve_bonferroni(const ChanceProgram& cp, const BonferroniPlan& plan, const SolveOptions& options) {
    return solve_lp(build_bonferroni_lp(cp, plan), options);
}

SolveResult solve_classical(const ChanceProgram& cp, const SolveOptions& options) {
    return solve_mip(build_classical_mip(cp), options);
}

} // namespace drcc
