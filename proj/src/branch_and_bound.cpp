#include "drcc/solve.hpp"

#include <chrono>
#include <cmath>
#include <queue>

namespace drcc {

std::string status_name(SolveStatus status) {
    switch (status) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::TimeLimit: return "time_limit";
    }
    return "unknown";
}

double max_violation(const MipModel& model, const Vector& values) {
    double worst = 0.0;
    for (int j = 0; j < model.num_variables(); ++j) {
        const auto& v = model.variables[j];
        worst = std::max({worst, v.lo - values(j), values(j) - v.hi});
        if (v.binary) worst = std::max(worst, std::abs(values(j) - std::round(values(j))));
    }
    for (const auto& r : model.rows) {
        double activity = 0.0;
        for (const auto& [j, coef] : r.terms) activity += coef * values(j);
        switch (r.sense) {
        case Sense::LessEqual: worst = std::max(worst, activity - r.rhs); break;
        case Sense::GreaterEqual: worst = std::max(worst, r.rhs - activity); break;
        case Sense::Equal: worst = std::max(worst, std::abs(activity - r.rhs)); break;
        }
    }
    return worst;
}

namespace {

void fill_solution(const MipModel& model, const Vector& values, SolveResult& out) {
    out.values = values;
    const std::vector<int> decisions = model.indices(VarRole::Decision);
    out.x.resize(static_cast<Eigen::Index>(decisions.size()));
    for (std::size_t k = 0; k < decisions.size(); ++k) out.x(static_cast<Eigen::Index>(k)) = values(decisions[k]);
    out.q.clear();
    for (int j = 0; j < model.num_variables(); ++j) {
        if (model.variables[j].binary) out.q.push_back(static_cast<int>(std::lround(values(j))));
    }
    out.objective = model.objective_offset;
    for (int j = 0; j < model.num_variables(); ++j) out.objective += model.objective[j] * values(j);
}

struct Node {
    double bound;
    int depth;
    long id;
    Vector lo;
    Vector hi;
};

struct NodeOrder {
    bool operator()(const Node& l, const Node& r) const {
        if (l.bound != r.bound) return l.bound > r.bound;
        if (l.depth != r.depth) return l.depth < r.depth;
        return l.id > r.id;
    }
};

} // namespace

SolveResult solve_lp(const MipModel& model, const SolveOptions& options) {
    SolveResult out;
    out.diagnostics = model.diagnostics;
    const LpProblem lp = model.relaxation();
    const LpSolution sol = simplex_solve(lp, options.lp);
    out.iteration_count = sol.iterations;
    out.node_count = 1;
    switch (sol.status) {
    case LpStatus::Infeasible: out.status = SolveStatus::Infeasible; return out;
    case LpStatus::Unbounded: out.status = SolveStatus::Unbounded; return out;
    case LpStatus::Optimal: break;
    }
    out.status = SolveStatus::Optimal;
    fill_solution(model, sol.x, out);
    out.bound = out.objective;
    out.bound_gap = 0.0;
    return out;
}

SolveResult solve_mip(const MipModel& model, const SolveOptions& options) {
    if (model.num_binaries() == 0) return solve_lp(model, options);

    using Clock = std::chrono::steady_clock;
    const auto start = Clock::now();
    auto out_of_time = [&] {
        return std::chrono::duration<double>(Clock::now() - start).count() > options.time_limit;
    };

    SolveResult out;
    out.diagnostics = model.diagnostics;
    LpProblem lp = model.relaxation();
    std::vector<int> binaries;
    for (int j = 0; j < model.num_variables(); ++j) {
        if (model.variables[j].binary) binaries.push_back(j);
    }

    double incumbent = kInf;
    Vector incumbent_values;
    auto cutoff = [&] { return incumbent - options.relative_gap * std::max(1.0, std::abs(incumbent)); };

    std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
    long next_id = 0;
    open.push({-kInf, 0, next_id++, lp.col_lo, lp.col_hi});
    bool stopped = false;
    double pruned_floor = kInf;

    while (!open.empty()) {
        if (out.node_count >= options.node_limit || out_of_time()) {
            stopped = true;
            break;
        }
        Node node = open.top();
        open.pop();
        if (std::isfinite(incumbent) && node.bound >= cutoff()) {
            pruned_floor = std::min(pruned_floor, node.bound);
            continue;
        }

        lp.col_lo = node.lo;
        lp.col_hi = node.hi;
        const LpSolution sol = simplex_solve(lp, options.lp);
        ++out.node_count;
        out.iteration_count += sol.iterations;
        if (sol.status == LpStatus::Infeasible) continue;
        if (sol.status == LpStatus::Unbounded) {
            out.status = SolveStatus::Unbounded;
            return out;
        }
        const double value = sol.objective + model.objective_offset;
        if (std::isfinite(incumbent) && value >= cutoff()) {
            pruned_floor = std::min(pruned_floor, value);
            continue;
        }

        int branch = -1;
        double best_frac = options.integrality_tol;
        for (int j : binaries) {
            const double f = sol.x(j) - std::floor(sol.x(j));
            const double dist = std::min(f, 1.0 - f);
            if (dist > best_frac) {
                best_frac = dist;
                branch = j;
            }
        }

        if (branch < 0) {
            // polish: fix binaries at their rounded values and re-solve the continuous part
            Vector values = sol.x;
            double polished = value;
            LpProblem fixed = lp;
            for (int j : binaries) fixed.col_lo(j) = fixed.col_hi(j) = std::round(sol.x(j));
            const LpSolution clean = simplex_solve(fixed, options.lp);
            out.iteration_count += clean.iterations;
            if (clean.status == LpStatus::Optimal) {
                values = clean.x;
                polished = clean.objective + model.objective_offset;
            } else {
                for (int j : binaries) values(j) = std::round(values(j));
            }
            if (polished < incumbent) {
                incumbent = polished;
                incumbent_values = values;
            }
            continue;
        }

        for (double side : {0.0, 1.0}) {
            Node child{value, node.depth + 1, next_id++, node.lo, node.hi};
            child.lo(branch) = side;
            child.hi(branch) = side;
            open.push(std::move(child));
        }
    }

    double bound = std::min(incumbent, pruned_floor);
    if (stopped) {
        while (!open.empty()) {
            bound = std::min(bound, open.top().bound);
            open.pop();
        }
    }

    if (incumbent_values.size() == 0) {
        out.status = stopped ? SolveStatus::TimeLimit : SolveStatus::Infeasible;
        out.bound = bound;
        out.bound_gap = kInf;
        return out;
    }
    fill_solution(model, incumbent_values, out);
    out.bound = std::min(bound, out.objective);
    out.bound_gap = (out.objective - out.bound) / std::max(1.0, std::abs(out.objective));
    out.status = stopped ? SolveStatus::TimeLimit : SolveStatus::Optimal;
    return out;
}

} // namespace drcc
