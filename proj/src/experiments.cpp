#include "drcc/experiments.hpp"

#include "drcc/export.hpp"
#include "drcc/oracle.hpp"
#include "drcc/reform.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace drcc {

ChanceProgram gen_portfolio(const PortfolioConfig& cfg) {
    if (cfg.assets < 1 || cfg.samples < 1) throw PreconditionError("portfolio needs assets and samples");
    Rng rng(cfg.seed);
    const int K = cfg.assets;
    ChanceProgram cp;
    cp.cost.resize(K);
    for (int k = 0; k < K; ++k) cp.cost(k) = static_cast<double>(rng.integer(1, 100));
    Matrix samples(cfg.samples, K);
    for (int i = 0; i < cfg.samples; ++i) {
        for (int k = 0; k < K; ++k) samples(i, k) = rng.uniform(0.8, 1.5);
    }
    const double x_max = 10.0 * cfg.target / samples.minCoeff();
    const double floor_sum = cfg.target / samples.maxCoeff();

    // -x <= 0, x <= x_max, -sum x <= -floor_sum
    cp.feasible.G = Matrix::Zero(2 * K + 1, K);
    cp.feasible.h = Vector::Zero(2 * K + 1);
    for (int k = 0; k < K; ++k) {
        cp.feasible.G(k, k) = -1.0;
        cp.feasible.G(K + k, k) = 1.0;
        cp.feasible.h(K + k) = x_max;
        cp.feasible.G(2 * K, k) = -1.0;
    }
    cp.feasible.h(2 * K) = -floor_sum;

    // (-xi)^T x < -target
    IndividualSafety s;
    s.A = -Matrix::Identity(K, K);
    s.a = Vector::Zero(K);
    s.b = Vector::Zero(K);
    s.b0 = -cfg.target;
    cp.safety = s;
    cp.epsilon = cfg.epsilon;
    cp.ball = {cfg.theta, cfg.norm, TrainingSet(std::move(samples))};
    return cp;
}

double portfolio_box_bound(const ChanceProgram& cp) {
    return cp.feasible.h(cp.num_decisions());
}

namespace {

struct TransportSites {
    Vector mean_demand;
    Vector cost;
    Vector raw_capacity;
};

TransportSites transport_sites(const TransportConfig& cfg, Rng& rng) {
    const int F = cfg.factories;
    const int D = cfg.centers;
    Matrix factory(F, 2), center(D, 2);
    for (int f = 0; f < F; ++f) factory.row(f) << rng.uniform(0, 10), rng.uniform(0, 10);
    for (int d = 0; d < D; ++d) center.row(d) << rng.uniform(0, 10), rng.uniform(0, 10);
    TransportSites out;
    out.cost.resize(F * D);
    for (int f = 0; f < F; ++f) {
        for (int d = 0; d < D; ++d) out.cost(f * D + d) = (factory.row(f) - center.row(d)).norm();
    }
    out.mean_demand.resize(D);
    for (int d = 0; d < D; ++d) out.mean_demand(d) = rng.uniform(0, 10);
    out.raw_capacity.resize(F);
    for (int f = 0; f < F; ++f) out.raw_capacity(f) = rng.uniform(0.1, 1.0);
    return out;
}

Matrix draw_demands(const Vector& mean, int count, Rng& rng) {
    Matrix out(count, mean.size());
    for (int i = 0; i < count; ++i) {
        for (Eigen::Index d = 0; d < mean.size(); ++d) out(i, d) = rng.uniform(0.8 * mean(d), 1.2 * mean(d));
    }
    return out;
}

} // namespace

ChanceProgram gen_transportation(const TransportConfig& cfg) {
    if (cfg.factories < 1 || cfg.centers < 1 || cfg.samples < 1) {
        throw PreconditionError("transportation needs factories, centers and samples");
    }
    Rng rng(cfg.seed);
    const int F = cfg.factories;
    const int D = cfg.centers;
    const int L = F * D;
    const TransportSites sites = transport_sites(cfg, rng);
    Matrix samples = draw_demands(sites.mean_demand, cfg.samples, rng);
    const double peak = samples.rowwise().sum().maxCoeff();
    const Vector capacity = sites.raw_capacity * (1.5 * peak / sites.raw_capacity.sum());

    ChanceProgram cp;
    cp.cost = sites.cost;
    cp.feasible.G = Matrix::Zero(L + F, L);
    cp.feasible.h = Vector::Zero(L + F);
    for (int j = 0; j < L; ++j) cp.feasible.G(j, j) = -1.0;
    for (int f = 0; f < F; ++f) {
        for (int d = 0; d < D; ++d) cp.feasible.G(L + f, f * D + d) = 1.0;
        cp.feasible.h(L + f) = capacity(f);
    }
    // -sum_f x_fd < -xi_d
    JointRhsSafety s;
    for (int d = 0; d < D; ++d) {
        JointRow row{Vector::Zero(L), Vector::Zero(D), 0.0};
        for (int f = 0; f < F; ++f) row.a(f * D + d) = -1.0;
        row.b(d) = -1.0;
        s.rows.push_back(std::move(row));
    }
    cp.safety = std::move(s);
    cp.epsilon = cfg.epsilon;
    cp.ball = {cfg.theta, cfg.norm, TrainingSet(std::move(samples))};
    return cp;
}

TrainingSet transportation_demands(const TransportConfig& cfg, int count, std::uint64_t stream) {
    Rng rng(cfg.seed);
    const TransportSites sites = transport_sites(cfg, rng);
    Rng fresh(cfg.seed ^ (0x9E3779B97F4A7C15ULL * (stream + 1)));
    return TrainingSet(draw_demands(sites.mean_demand, count, fresh));
}

double max_feasible_radius(const ChanceProgram& cp, const SolveOptions& options) {
    if (!cp.is_joint()) throw PreconditionError("the radius search is implemented for joint conditions");
    ChanceProgram probe = cp;
    probe.ball.radius = 1.0;
    MipModel m = build_joint_rhs_mip(probe, derive_big_m(probe));
    const auto N = static_cast<double>(cp.num_samples());
    auto risk = std::find_if(m.rows.begin(), m.rows.end(), [](const LinearRow& r) { return r.name == "risk"; });
    m.rows.erase(risk);
    std::fill(m.objective.begin(), m.objective.end(), 0.0);
    // maximize (eps N t - sum s) / N
    for (int j : m.indices(VarRole::Threshold)) m.objective[j] = -cp.epsilon;
    for (int j : m.indices(VarRole::Slack)) m.objective[j] = 1.0 / N;
    m.name = "radius";
    const SolveResult r = solve_mip(m, options);
    if (!r.has_solution()) throw Error("radius search found no solution (" + status_name(r.status) + ")");
    return -r.objective;
}

std::vector<double> theta_grid(double max_radius, int points, double first) {
    const double last = max_radius + 1e-6 * std::max(1e-3, max_radius);
    if (!(last > first) || points < 2) {
        throw PreconditionError("largest feasible radius " + format_number(max_radius) +
                                " does not exceed the first grid point");
    }
    std::vector<double> out;
    for (int k = 0; k < points; ++k) out.push_back(first + (last - first) * k / (points - 1));
    return out;
}

OutOfSample evaluate_out_of_sample(const ChanceProgram& cp, const Vector& x, const TrainingSet& fresh,
                                   double tolerance) {
    const std::vector<Halfspace> unsafe = unsafe_halfspaces(cp, x);
    int violated = 0;
    for (Eigen::Index i = 0; i < fresh.size(); ++i) {
        const Vector xi = fresh.sample(i);
        for (const Halfspace& h : unsafe) {
            if (!(h.normal.dot(xi) - h.offset > -tolerance)) {
                ++violated;
                break;
            }
        }
    }
    return {static_cast<double>(violated) / static_cast<double>(fresh.size()), cp.cost.dot(x)};
}

CrossValidation cross_validate_theta(const ChanceProgram& cp, const std::vector<double>& thetas, int folds,
                                     const SolveOptions& options) {
    if (folds < 1) throw PreconditionError("need at least one fold");
    const auto N = static_cast<int>(cp.num_samples());
    if (folds > N) throw PreconditionError("more folds than samples");
    CrossValidation out;
    out.thetas = thetas;
    std::vector<std::vector<int>> train(folds), held(folds);
    for (int k = 0; k < folds; ++k) {
        for (int i = 0; i < N; ++i) {
            if (folds == 1 || i % folds != k) train[k].push_back(i);
            if (folds == 1 || i % folds == k) held[k].push_back(i);
        }
    }
    ExactOptions exact;
    exact.solver = options;
    for (double theta : thetas) {
        double total = 0.0;
        for (int k = 0; k < folds; ++k) {
            ChanceProgram sub = cp;
            sub.ball.radius = theta;
            sub.ball.center = cp.ball.center.subset(train[k]);
            const SolveResult r = solve_exact(sub, exact);
            if (!r.has_solution()) {
                total = kInf;
                break;
            }
            total += evaluate_out_of_sample(cp, r.x, cp.ball.center.subset(held[k])).violation;
        }
        out.mean_violation.push_back(total / folds);
    }
    for (std::size_t k = 0; k < thetas.size(); ++k) {
        if (out.mean_violation[k] <= cp.epsilon) {
            out.chosen = static_cast<int>(k);
            break;
        }
    }
    return out;
}

namespace {

double default_theta(double theta, int samples) {
    return theta > 0.0 ? theta : 1.0 / std::sqrt(static_cast<double>(samples));
}

Matrix two_point_samples(int count, double p, std::uint64_t seed, Eigen::Index dim) {
    Rng rng(seed);
    Matrix out = Matrix::Zero(count, dim);
    for (int i = 0; i < count; ++i) {
        if (rng.uniform() < p) out(i, 0) = 1.0;
    }
    return out;
}

JointRow coordinate_row(Eigen::Index L, Eigen::Index K, Eigen::Index x_index, Eigen::Index xi_index) {
    // -x_j < -xi_k
    JointRow row{Vector::Zero(L), Vector::Zero(K), 0.0};
    row.a(x_index) = -1.0;
    row.b(xi_index) = -1.0;
    return row;
}

} // namespace

ChanceProgram example1_problem(const Example1Config& cfg) {
    if (!(cfg.p > 0.0 && cfg.p < cfg.epsilon)) throw PreconditionError("example 1 needs 0 < p < epsilon");
    if (!(0.0 < cfg.x_low && cfg.x_low <= cfg.x_high && cfg.x_high < 1.0)) {
        throw PreconditionError("example 1 needs 0 < x_low <= x_high < 1");
    }
    ChanceProgram cp;
    cp.cost = Vector::Zero(2);
    cp.cost(0) = 1.0;
    cp.feasible.G = Matrix::Zero(4, 2);
    cp.feasible.G << -1, 0, 1, 0, 0, -1, 0, 1;
    cp.feasible.h = Vector(4);
    cp.feasible.h << -cfg.x_low, cfg.x_high, 0.0, cfg.x2_cap;
    JointRhsSafety s;
    s.rows.push_back(coordinate_row(2, 2, 0, 0));
    s.rows.push_back(coordinate_row(2, 2, 1, 1));
    cp.safety = std::move(s);
    cp.epsilon = cfg.epsilon;
    cp.ball = {default_theta(cfg.theta, cfg.samples), Norm::l1(),
               TrainingSet(two_point_samples(cfg.samples, cfg.p, cfg.seed, 2))};
    return cp;
}

Example1Report run_incomparability_ex1(const Example1Config& cfg) {
    if (!(cfg.p > cfg.x_high * cfg.epsilon && cfg.p < cfg.epsilon)) {
        throw PreconditionError("example 1 needs x_high * epsilon < p < epsilon");
    }
    const ChanceProgram cp = example1_problem(cfg);
    const TrainingSet& ts = cp.ball.center;
    const double theta = cp.ball.radius;
    const auto N = static_cast<double>(ts.size());
    Example1Report r;
    r.theta = theta;
    r.unsafe_count = static_cast<int>(ts.samples().col(0).sum());

    // Bonferroni: scan eps_1 over (p, eps) and keep the cheapest feasible split
    for (int k = 1; k < 100; ++k) {
        const double eps1 = cfg.p + (cfg.epsilon - cfg.p) * k / 100.0;
        const BonferroniPlan plan = make_bonferroni_plan(cp, std::vector<double>{eps1, cfg.epsilon - eps1});
        const SolveResult s = solve_bonferroni(cp, plan);
        if (s.status == SolveStatus::Optimal && s.objective < r.bonferroni_objective) {
            r.bonferroni_feasible = true;
            r.bonferroni_objective = s.objective;
            r.best_risk_split = eps1;
        }
    }

    // CVaR margins grow with x, so the upper corner of X decides feasibility
    Vector corner(2);
    corner << cfg.x_high, cfg.x2_cap;
    r.cvar_infeasible_for_all = true;
    for (int k = 1; k <= 99; ++k) {
        const double w1 = k / 100.0;
        Vector w(2);
        w << w1, 1.0 - w1;
        const bool ok = check_cvar_feasible_joint(ts, cp.joint(), corner, theta, cp.epsilon, cp.ball.norm, w).feasible;
        r.weights.push_back(w1);
        r.cvar_feasible.push_back(ok);
        if (ok) r.cvar_infeasible_for_all = false;
    }

    std::vector<double> first(static_cast<std::size_t>(ts.size()));
    for (Eigen::Index i = 0; i < ts.size(); ++i) first[i] = cfg.x_high - ts.samples()(i, 0);
    std::sort(first.begin(), first.end());
    r.certificate_lhs = partial_sum(first, cp.epsilon * N);
    r.certificate = r.certificate_lhs < theta * N;
    return r;
}

ChanceProgram example2_problem(const Example2Config& cfg) {
    if (!(0.5 < cfg.x_low && cfg.x_low <= 1.0)) throw PreconditionError("example 2 needs 1/2 < x_low <= 1");
    ChanceProgram cp;
    cp.cost = Vector::Zero(3);
    cp.cost(2) = 1.0;
    cp.feasible.G = Matrix::Zero(8, 3);
    cp.feasible.h = Vector::Zero(8);
    for (int j = 0; j < 3; ++j) {
        cp.feasible.G(j, j) = -1.0;
        cp.feasible.h(j) = -cfg.x_low;
        cp.feasible.G(3 + j, j) = 1.0;
        cp.feasible.h(3 + j) = 1.0;
    }
    cp.feasible.G.row(6) << 1, 0, -1;
    cp.feasible.G.row(7) << 0, 1, -1;
    JointRhsSafety s;
    s.rows.push_back(coordinate_row(3, 1, 0, 0));
    s.rows.push_back(coordinate_row(3, 1, 1, 0));
    cp.safety = std::move(s);
    cp.epsilon = cfg.epsilon;
    cp.ball = {default_theta(cfg.theta, cfg.samples), Norm::l1(),
               TrainingSet(two_point_samples(cfg.samples, cfg.p, cfg.seed, 1))};
    return cp;
}

Example2Report run_incomparability_ex2(const Example2Config& cfg) {
    if (!(cfg.p > cfg.epsilon / 2 && cfg.p <= cfg.x_low * cfg.epsilon)) {
        throw PreconditionError("example 2 needs epsilon / 2 < p <= x_low * epsilon");
    }
    const ChanceProgram cp = example2_problem(cfg);
    const TrainingSet& ts = cp.ball.center;
    const double theta = cp.ball.radius;
    const auto N = static_cast<double>(ts.size());
    const double eps_n = cp.epsilon * N;
    Example2Report r;
    r.theta = theta;
    r.unsafe_count = static_cast<int>(ts.samples().col(0).sum());
    const double I = r.unsafe_count;

    // x3 >= x_low on X, so feasibility at (x_low, x_low, x_low) means objective x_low
    const Vector x = Vector::Constant(3, cfg.x_low);
    Vector w(2);
    w << 0.5, 0.5;
    const FeasibilityReport check = check_cvar_feasible_joint(ts, cp.joint(), x, theta, cp.epsilon, cp.ball.norm, w);
    r.cvar_lhs = check.lhs;
    r.closed_form_lhs = (std::min(eps_n, I) * (cfg.x_low - 1.0) + std::max(0.0, eps_n - I) * cfg.x_low) / N;
    r.cvar_feasible = check.feasible;
    if (check.feasible) r.cvar_objective = cp.cost.dot(x);

    r.bonferroni_infeasible_for_all = true;
    for (int k = 1; k < 100; ++k) {
        const double eps1 = cp.epsilon * k / 100.0;
        const BonferroniPlan plan = make_bonferroni_plan(cp, std::vector<double>{eps1, cp.epsilon - eps1});
        const bool ok = solve_bonferroni(cp, plan).status == SolveStatus::Optimal;
        r.risk_splits.push_back(eps1);
        r.bonferroni_feasible.push_back(ok);
        if (ok) r.bonferroni_infeasible_for_all = false;
    }
    return r;
}

namespace {

std::string fmt(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return format_number(v);
}

} // namespace

std::string portfolio_experiment_csv(std::uint64_t seed, const SolveOptions& options) {
    std::ostringstream out;
    out << "seed,epsilon,theta,method,status,objective,nodes,worst_case_probability,box_inactive\n";
    ExactOptions exact;
    exact.solver = options;
    for (double epsilon : {0.05, 0.1}) {
        for (double theta : {0.05, 0.1, 0.2}) {
            PortfolioConfig cfg;
            cfg.seed = seed;
            cfg.epsilon = epsilon;
            cfg.theta = theta;
            const ChanceProgram cp = gen_portfolio(cfg);
            const double cap = portfolio_box_bound(cp);
            for (const char* method : {"exact", "cvar"}) {
                const bool is_exact = std::string(method) == "exact";
                const SolveResult r = is_exact ? solve_exact(cp, exact) : solve_cvar(cp, {}, options);
                out << seed << "," << fmt(epsilon) << "," << fmt(theta) << "," << method << ","
                    << status_name(r.status) << ",";
                if (r.has_solution()) {
                    const auto hs = unsafe_halfspaces(cp, r.x);
                    const double prob = worst_case_probability(cp.ball.center, hs, theta, cp.ball.norm).probability;
                    const bool inactive = (r.x.array() < cap - 1e-9).all();
                    out << fmt(r.objective) << "," << r.node_count << "," << fmt(prob) << "," << (inactive ? 1 : 0);
                } else {
                    out << ",," << r.node_count << ",";
                }
                out << "\n";
            }
        }
    }
    return out.str();
}

std::string transport_experiment_csv(std::uint64_t seed, const SolveOptions& options) {
    TransportConfig cfg;
    cfg.seed = seed;
    ChanceProgram cp = gen_transportation(cfg);
    std::ostringstream out;
    out << "seed,method,theta_index,theta,status,objective,nodes,bound_gap\n";
    const double top = max_feasible_radius(cp, options);
    const std::vector<double> grid = theta_grid(top);
    ExactOptions exact;
    exact.solver = options;
    auto row = [&](const char* method, int index, double theta, const SolveResult& r) {
        out << seed << "," << method << "," << index << "," << fmt(theta) << "," << status_name(r.status) << ","
            << (r.has_solution() ? fmt(r.objective) : "") << "," << r.node_count << ","
            << (r.has_solution() ? fmt(r.bound_gap) : "") << "\n";
    };
    for (std::size_t k = 0; k < grid.size(); ++k) {
        cp.ball.radius = grid[k];
        row("exact", static_cast<int>(k + 1), grid[k], solve_exact(cp, exact));
    }
    cp.ball.radius = 0.0;
    row("classical", 0, 0.0, solve_classical(cp, options));
    return out.str();
}

std::string example1_csv(const Example1Report& r) {
    std::ostringstream out;
    out << "quantity,value\n";
    out << "theta," << fmt(r.theta) << "\n";
    out << "unsafe_count," << r.unsafe_count << "\n";
    out << "bonferroni_feasible," << (r.bonferroni_feasible ? 1 : 0) << "\n";
    out << "bonferroni_objective," << fmt(r.bonferroni_objective) << "\n";
    out << "bonferroni_risk_split," << fmt(r.best_risk_split) << "\n";
    int feasible = 0;
    for (bool b : r.cvar_feasible) feasible += b ? 1 : 0;
    out << "cvar_weights_tested," << r.weights.size() << "\n";
    out << "cvar_weights_feasible," << feasible << "\n";
    out << "cvar_infeasible_for_all," << (r.cvar_infeasible_for_all ? 1 : 0) << "\n";
    out << "certificate_lhs," << fmt(r.certificate_lhs) << "\n";
    out << "certificate," << (r.certificate ? 1 : 0) << "\n";
    return out.str();
}

std::string example2_csv(const Example2Report& r) {
    std::ostringstream out;
    out << "quantity,value\n";
    out << "theta," << fmt(r.theta) << "\n";
    out << "unsafe_count," << r.unsafe_count << "\n";
    out << "cvar_lhs," << fmt(r.cvar_lhs) << "\n";
    out << "closed_form_lhs," << fmt(r.closed_form_lhs) << "\n";
    out << "cvar_feasible," << (r.cvar_feasible ? 1 : 0) << "\n";
    out << "cvar_objective," << fmt(r.cvar_objective) << "\n";
    int feasible = 0;
    for (bool b : r.bonferroni_feasible) feasible += b ? 1 : 0;
    out << "bonferroni_splits_tested," << r.risk_splits.size() << "\n";
    out << "bonferroni_splits_feasible," << feasible << "\n";
    out << "bonferroni_infeasible_for_all," << (r.bonferroni_infeasible_for_all ? 1 : 0) << "\n";
    return out.str();
}

std::string crossval_experiment_csv(std::uint64_t seed, const SolveOptions& options) {
    TransportConfig cfg;
    cfg.seed = seed;
    cfg.samples = 21;
    ChanceProgram cp = gen_transportation(cfg);
    const std::vector<double> grid = theta_grid(max_feasible_radius(cp, options));
    const CrossValidation cv = cross_validate_theta(cp, grid, 7, options);
    const TrainingSet fresh = transportation_demands(cfg, 1000, 1);
    ExactOptions exact;
    exact.solver = options;
    std::ostringstream out;
    out << "seed,theta_index,theta,mean_heldout_violation,chosen,status,objective,out_of_sample_violation\n";
    for (std::size_t k = 0; k < grid.size(); ++k) {
        cp.ball.radius = grid[k];
        const SolveResult r = solve_exact(cp, exact);
        out << seed << "," << k + 1 << "," << fmt(grid[k]) << "," << fmt(cv.mean_violation[k]) << ","
            << (cv.chosen == static_cast<int>(k) ? 1 : 0) << "," << status_name(r.status) << ",";
        if (r.has_solution()) {
            out << fmt(r.objective) << "," << fmt(evaluate_out_of_sample(cp, r.x, fresh).violation);
        } else {
            out << ",";
        }
        out << "\n";
    }
    return out.str();
}

} // namespace drcc
