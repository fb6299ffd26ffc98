#include "drcc/simplex.hpp"

#include <cmath>
#include <vector>

namespace drcc {
namespace {

enum class State : unsigned char { Basic, AtLower, AtUpper, Free };

class BoundedSimplex {
public:
    BoundedSimplex(const LpProblem& lp, const SimplexOptions& options)
        : lp_(lp), opt_(options) {}

    LpSolution run();

private:
    bool initialize();
    /// Returns false when the problem is unbounded for the given costs.
    bool optimize(const Vector& costs);
    void pivot(Eigen::Index row, Eigen::Index entering);
    void refactor(const Vector& costs);
    double basic_violation() const;
    bool is_fixed(Eigen::Index j) const { return hi_(j) - lo_(j) <= 0.0; }

    const LpProblem& lp_;
    SimplexOptions opt_;

    std::vector<Eigen::Index> kept_rows_;
    Eigen::Index m_ = 0;      // rows kept
    Eigen::Index n_ = 0;      // structurals
    Eigen::Index total_ = 0;  // structurals + slacks + artificials
    Eigen::MatrixXd full_;    // [A | -I | artificials]
    Vector lo_, hi_, value_;
    std::vector<State> state_;
    std::vector<Eigen::Index> basis_;
    Eigen::MatrixXd tableau_;
    Vector reduced_;
    long iterations_ = 0;
    int since_refactor_ = 0;
};

bool BoundedSimplex::initialize() {
    const Eigen::Index rows = lp_.A.rows();
    n_ = lp_.A.cols();
    for (Eigen::Index r = 0; r < rows; ++r) {
        if (lp_.A.row(r).cwiseAbs().maxCoeff() > 0.0) {
            kept_rows_.push_back(r);
        } else if (lp_.row_lo(r) > opt_.feasibility_tol || lp_.row_hi(r) < -opt_.feasibility_tol) {
            return false;
        }
    }
    m_ = static_cast<Eigen::Index>(kept_rows_.size());

    // structural start values
    Vector x0(n_);
    for (Eigen::Index j = 0; j < n_; ++j) {
        if (lp_.col_lo(j) > lp_.col_hi(j) + opt_.feasibility_tol) return false;
        if (std::isfinite(lp_.col_lo(j))) x0(j) = lp_.col_lo(j);
        else if (std::isfinite(lp_.col_hi(j))) x0(j) = lp_.col_hi(j);
        else x0(j) = 0.0;
    }

    std::vector<Eigen::Index> artificial_rows;
    std::vector<double> artificial_sign;
    Vector activity(m_);
    for (Eigen::Index r = 0; r < m_; ++r) {
        activity(r) = lp_.A.row(kept_rows_[r]).dot(x0);
        const double lo = lp_.row_lo(kept_rows_[r]);
        const double hi = lp_.row_hi(kept_rows_[r]);
        if (activity(r) < lo - opt_.feasibility_tol) {
            artificial_rows.push_back(r);
            artificial_sign.push_back(1.0);
        } else if (activity(r) > hi + opt_.feasibility_tol) {
            artificial_rows.push_back(r);
            artificial_sign.push_back(-1.0);
        }
    }
    const auto num_art = static_cast<Eigen::Index>(artificial_rows.size());
    total_ = n_ + m_ + num_art;

    full_ = Eigen::MatrixXd::Zero(m_, total_);
    for (Eigen::Index r = 0; r < m_; ++r) {
        full_.row(r).head(n_) = lp_.A.row(kept_rows_[r]);
        full_(r, n_ + r) = -1.0;
    }
    lo_.resize(total_);
    hi_.resize(total_);
    value_.setZero(total_);
    state_.assign(static_cast<std::size_t>(total_), State::AtLower);
    basis_.assign(static_cast<std::size_t>(m_), 0);

    for (Eigen::Index j = 0; j < n_; ++j) {
        lo_(j) = lp_.col_lo(j);
        hi_(j) = std::max(lp_.col_hi(j), lp_.col_lo(j));
        value_(j) = x0(j);
        if (std::isfinite(lo_(j))) state_[j] = State::AtLower;
        else if (std::isfinite(hi_(j))) state_[j] = State::AtUpper;
        else state_[j] = State::Free;
    }
    for (Eigen::Index r = 0; r < m_; ++r) {
        const Eigen::Index s = n_ + r;
        lo_(s) = lp_.row_lo(kept_rows_[r]);
        hi_(s) = std::max(lp_.row_hi(kept_rows_[r]), lp_.row_lo(kept_rows_[r]));
        state_[s] = State::Basic;
        basis_[r] = s;
        value_(s) = activity(r);
    }
    for (Eigen::Index k = 0; k < num_art; ++k) {
        const Eigen::Index r = artificial_rows[k];
        const Eigen::Index s = n_ + r;
        const Eigen::Index art = n_ + m_ + k;
        // slack leaves at its violated bound, the artificial absorbs the residual
        const double bound = artificial_sign[k] > 0 ? lo_(s) : hi_(s);
        state_[s] = artificial_sign[k] > 0 ? State::AtLower : State::AtUpper;
        value_(s) = bound;
        full_(r, art) = artificial_sign[k];
        lo_(art) = 0.0;
        hi_(art) = kInf;
        value_(art) = std::abs(bound - activity(r));
        state_[art] = State::Basic;
        basis_[r] = art;
    }

    // B is diagonal with entries -1 (slack) or the artificial sign
    tableau_ = full_;
    for (Eigen::Index r = 0; r < m_; ++r) tableau_.row(r) /= full_(r, basis_[r]);
    return true;
}

void BoundedSimplex::refactor(const Vector& costs) {
    since_refactor_ = 0;
    if (m_ == 0) {
        reduced_ = costs;
        return;
    }
    Eigen::MatrixXd basis_matrix(m_, m_);
    for (Eigen::Index r = 0; r < m_; ++r) basis_matrix.col(r) = full_.col(basis_[r]);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(basis_matrix);
    const Eigen::MatrixXd& packed = lu.matrixLU();
    const double scale = std::max(1.0, packed.diagonal().cwiseAbs().maxCoeff());
    for (Eigen::Index r = 0; r < m_; ++r) {
        if (std::abs(packed(r, r)) < 1e-12 * scale) {
            throw NumericalError(static_cast<int>(kept_rows_[r]),
                                 "singular basis near row " + std::to_string(kept_rows_[r]));
        }
    }
    tableau_ = lu.solve(full_);
    Vector rhs = Vector::Zero(m_);
    for (Eigen::Index j = 0; j < total_; ++j) {
        if (state_[j] != State::Basic && value_(j) != 0.0) rhs -= full_.col(j) * value_(j);
    }
    const Vector xb = lu.solve(rhs);
    for (Eigen::Index r = 0; r < m_; ++r) value_(basis_[r]) = xb(r);
    Vector cb(m_);
    for (Eigen::Index r = 0; r < m_; ++r) cb(r) = costs(basis_[r]);
    reduced_ = costs - tableau_.transpose() * cb;
    for (Eigen::Index r = 0; r < m_; ++r) reduced_(basis_[r]) = 0.0;
}

void BoundedSimplex::pivot(Eigen::Index row, Eigen::Index entering) {
    const Vector column = tableau_.col(entering);
    const Eigen::RowVectorXd pivot_row = tableau_.row(row) / column(row);
    tableau_.noalias() -= column * pivot_row;
    tableau_.row(row) = pivot_row;
    reduced_ -= reduced_(entering) * pivot_row.transpose();
    reduced_(entering) = 0.0;
}

double BoundedSimplex::basic_violation() const {
    double worst = 0.0;
    for (Eigen::Index r = 0; r < m_; ++r) {
        const Eigen::Index j = basis_[r];
        worst = std::max({worst, lo_(j) - value_(j), value_(j) - hi_(j)});
    }
    return worst;
}

bool BoundedSimplex::optimize(const Vector& costs) {
    refactor(costs);
    int degenerate_run = 0;
    bool recheck_done = false;
    while (true) {
        if (iterations_ >= opt_.max_iterations) {
            throw NumericalError(-1, "simplex iteration limit reached");
        }
        const bool bland = degenerate_run >= opt_.degenerate_switch;

        // pricing
        Eigen::Index entering = -1;
        double direction = 0.0;
        double best_score = 0.0;
        for (Eigen::Index j = 0; j < total_; ++j) {
            if (state_[j] == State::Basic || is_fixed(j)) continue;
            const double d = reduced_(j);
            double dir = 0.0;
            if (state_[j] == State::AtLower && d < -opt_.optimality_tol) dir = 1.0;
            else if (state_[j] == State::AtUpper && d > opt_.optimality_tol) dir = -1.0;
            else if (state_[j] == State::Free && std::abs(d) > opt_.optimality_tol) dir = d < 0 ? 1.0 : -1.0;
            if (dir == 0.0) continue;
            if (bland) {
                entering = j;
                direction = dir;
                break;
            }
            if (std::abs(d) > best_score) {
                best_score = std::abs(d);
                entering = j;
                direction = dir;
            }
        }
        if (entering < 0) {
            // confirm optimality on a fresh factorization
            if (recheck_done && since_refactor_ == 0) return true;
            refactor(costs);
            recheck_done = true;
            continue;
        }
        recheck_done = false;

        // ratio test
        double step = kInf;
        Eigen::Index leave_row = -1;
        if (std::isfinite(lo_(entering)) && std::isfinite(hi_(entering))) step = hi_(entering) - lo_(entering);
        double best_pivot = 0.0;
        for (Eigen::Index r = 0; r < m_; ++r) {
            const double alpha = tableau_(r, entering);
            if (std::abs(alpha) <= opt_.pivot_tol) continue;
            const double rate = -direction * alpha; // d x_B(r) / d step
            const Eigen::Index j = basis_[r];
            double limit;
            if (rate < 0) {
                if (!std::isfinite(lo_(j))) continue;
                limit = std::max(0.0, value_(j) - lo_(j)) / -rate;
            } else {
                if (!std::isfinite(hi_(j))) continue;
                limit = std::max(0.0, hi_(j) - value_(j)) / rate;
            }
            const double tie = 1e-12 * std::max(1.0, std::abs(limit));
            bool take = false;
            if (limit < step - tie) {
                take = true;
            } else if (limit <= step + tie && leave_row >= 0) {
                take = bland ? basis_[r] < basis_[leave_row] : std::abs(alpha) > best_pivot;
            } else if (limit <= step + tie && leave_row < 0 && !bland) {
                // prefer a real pivot over a bound flip of equal length
                take = true;
            }
            if (take) {
                step = limit;
                leave_row = r;
                best_pivot = std::abs(alpha);
            }
        }
        if (!std::isfinite(step)) return false;

        ++iterations_;
        degenerate_run = step <= 1e-12 ? degenerate_run + 1 : 0;

        for (Eigen::Index r = 0; r < m_; ++r) {
            value_(basis_[r]) -= direction * step * tableau_(r, entering);
        }
        value_(entering) += direction * step;

        if (leave_row < 0) {
            // bound flip
            state_[entering] = direction > 0 ? State::AtUpper : State::AtLower;
            value_(entering) = direction > 0 ? hi_(entering) : lo_(entering);
            continue;
        }
        const Eigen::Index leaving = basis_[leave_row];
        const double rate = -direction * tableau_(leave_row, entering);
        if (rate < 0) {
            state_[leaving] = State::AtLower;
            value_(leaving) = lo_(leaving);
        } else {
            state_[leaving] = State::AtUpper;
            value_(leaving) = hi_(leaving);
        }
        pivot(leave_row, entering);
        basis_[leave_row] = entering;
        state_[entering] = State::Basic;
        if (++since_refactor_ >= opt_.refactor_interval) refactor(costs);
    }
}

LpSolution BoundedSimplex::run() {
    LpSolution out;
    if (!initialize()) {
        out.status = LpStatus::Infeasible;
        return out;
    }
    const Eigen::Index num_art = total_ - n_ - m_;
    if (num_art > 0) {
        Vector phase1 = Vector::Zero(total_);
        phase1.tail(num_art).setOnes();
        optimize(phase1);
        double infeasibility = value_.tail(num_art).sum();
        const double scale = std::max(1.0, lp_.A.cwiseAbs().maxCoeff());
        if (infeasibility > opt_.feasibility_tol * 10 * scale) {
            out.status = LpStatus::Infeasible;
            out.iterations = iterations_;
            return out;
        }
        for (Eigen::Index k = n_ + m_; k < total_; ++k) {
            hi_(k) = 0.0;
            if (state_[k] != State::Basic) {
                state_[k] = State::AtLower;
                value_(k) = 0.0;
            }
        }
    }
    Vector costs = Vector::Zero(total_);
    costs.head(n_) = lp_.cost;
    if (!optimize(costs)) {
        out.status = LpStatus::Unbounded;
        out.iterations = iterations_;
        return out;
    }
    if (basic_violation() > 1e-6 * std::max(1.0, value_.cwiseAbs().maxCoeff())) {
        throw NumericalError(-1, "simplex lost primal feasibility");
    }

    out.status = LpStatus::Optimal;
    out.iterations = iterations_;
    out.x = value_.head(n_);
    // clip tiny bound violations left by the tolerance-based ratio test
    for (Eigen::Index j = 0; j < n_; ++j) {
        if (std::isfinite(lo_(j))) out.x(j) = std::max(out.x(j), lo_(j));
        if (std::isfinite(hi_(j))) out.x(j) = std::min(out.x(j), hi_(j));
    }
    out.objective = lp_.cost.dot(out.x);

    out.duals = Vector::Zero(lp_.A.rows());
    if (m_ > 0) {
        Eigen::MatrixXd basis_matrix(m_, m_);
        Vector cb(m_);
        for (Eigen::Index r = 0; r < m_; ++r) {
            basis_matrix.col(r) = full_.col(basis_[r]);
            cb(r) = costs(basis_[r]);
        }
        const Vector y = basis_matrix.transpose().partialPivLu().solve(cb);
        for (Eigen::Index r = 0; r < m_; ++r) out.duals(kept_rows_[r]) = y(r);
    }
    out.reduced_costs = lp_.cost - lp_.A.transpose() * out.duals;
    double dual_obj = 0.0;
    for (Eigen::Index j = 0; j < n_; ++j) {
        if (state_[j] != State::Basic) dual_obj += out.reduced_costs(j) * value_(j);
    }
    for (Eigen::Index r = 0; r < m_; ++r) {
        const Eigen::Index s = n_ + r;
        if (state_[s] != State::Basic) dual_obj += out.duals(kept_rows_[r]) * value_(s);
    }
    out.dual_objective = dual_obj;
    return out;
}

} // namespace

LpSolution simplex_solve(const LpProblem& lp, const SimplexOptions& options) {
    BoundedSimplex solver(lp, options);
    return solver.run();
}

} // namespace drcc
