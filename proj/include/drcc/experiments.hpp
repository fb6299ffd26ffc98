#pragma once

#include "drcc/model.hpp"
#include "drcc/solve.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace drcc {

/// Seeded generator; draws are identical across platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Uniform integer in [lo, hi].
    long integer(long lo, long hi) {
        return lo + static_cast<long>(uniform() * static_cast<double>(hi - lo + 1));
    }

private:
    std::mt19937_64 engine_;
};

struct PortfolioConfig {
    std::uint64_t seed = 1;
    int assets = 5;
    int samples = 20;
    double target = 1.0;
    double epsilon = 0.1;
    double theta = 0.1;
    Norm norm = Norm::l1();
};

/// min c^T x  s.t.  P[xi^T x > target] >= 1 - eps over the ball, x >= 0,
/// with returns uniform on [0.8, 1.5] and costs uniform on {1, ..., 100}.
/// X is closed by x <= 10 target / min sample entry and the valid cut
/// sum x >= target / max sample entry.
ChanceProgram gen_portfolio(const PortfolioConfig& cfg);

/// Upper bound of the box added to the portfolio polytope.
double portfolio_box_bound(const ChanceProgram& cp);

struct TransportConfig {
    std::uint64_t seed = 1;
    int factories = 3;
    int centers = 5;
    int samples = 20;
    double epsilon = 0.1;
    double theta = 0.01;
    Norm norm = Norm::l2();
};

/// Transportation plan x_fd (index f * D + d) meeting every demand jointly
/// with high probability; costs are distances of random sites in [0,10]^2.
ChanceProgram gen_transportation(const TransportConfig& cfg);

/// Draws fresh demand samples from the distribution behind a transportation
/// instance generated with the same config.
TrainingSet transportation_demands(const TransportConfig& cfg, int count, std::uint64_t stream);

/// Largest radius at which the exact joint model is feasible, from a MIP that
/// maximizes the partial-sum test over X. Returns a negative value when X
/// admits no decision with every sample safe in the eps-N window.
double max_feasible_radius(const ChanceProgram& cp, const SolveOptions& options = {});

/// Ten ascending radii from 0.001 to just above the largest feasible radius.
std::vector<double> theta_grid(double max_radius, int points = 10, double first = 0.001);

struct OutOfSample {
    double violation = 0.0;
    double cost = 0.0;
};

/// Share of samples outside the open safety set. A positive tolerance counts
/// samples within that distance of the boundary as safe.
OutOfSample evaluate_out_of_sample(const ChanceProgram& cp, const Vector& x, const TrainingSet& fresh,
                                   double tolerance = 0.0);

struct CrossValidation {
    std::vector<double> thetas;
    std::vector<double> mean_violation; ///< +inf where a fold was infeasible
    int chosen = -1;                    ///< index into thetas, -1 if none qualifies
};

/// Smallest radius whose mean held-out violation over the folds is <= eps.
/// Fold k holds out samples with index i % folds == k; one fold holds out
/// the training set itself.
CrossValidation cross_validate_theta(const ChanceProgram& cp, const std::vector<double>& thetas, int folds = 7,
                                     const SolveOptions& options = {});

struct Example1Config {
    double p = 0.09;
    double epsilon = 0.1;
    double x_low = 0.5;
    double x_high = 0.8;
    int samples = 2000;
    std::uint64_t seed = 42;
    double theta = -1.0; ///< negative selects N^{-1/2}
    double x2_cap = 1000.0;
};

struct Example1Report {
    double theta = 0.0;
    int unsafe_count = 0;
    double best_risk_split = 0.0;  ///< eps_1 of the best feasible Bonferroni split
    bool bonferroni_feasible = false;
    double bonferroni_objective = kInf;
    std::vector<double> weights;   ///< w_1 grid
    std::vector<bool> cvar_feasible;
    bool cvar_infeasible_for_all = false;
    double certificate_lhs = 0.0;  ///< partial sum of x_high - xi_1 over the eps-N window
    bool certificate = false;      ///< certificate_lhs < theta N
};

/// Joint chance constraint min x1 s.t. P[x1 > xi1, x2 > xi2] >= 1 - eps with a
/// two-point distribution; Bonferroni beats CVaR.
ChanceProgram example1_problem(const Example1Config& cfg);
Example1Report run_incomparability_ex1(const Example1Config& cfg);

struct Example2Config {
    double p = 0.055;
    double epsilon = 0.1;
    double x_low = 0.6;
    int samples = 2000;
    std::uint64_t seed = 42;
    double theta = -1.0; ///< negative selects N^{-1/2}
};

struct Example2Report {
    double theta = 0.0;
    int unsafe_count = 0;
    double cvar_lhs = 0.0;
    double closed_form_lhs = 0.0;
    bool cvar_feasible = false;
    double cvar_objective = kInf;
    std::vector<double> risk_splits; ///< eps_1 grid
    std::vector<bool> bonferroni_feasible;
    bool bonferroni_infeasible_for_all = false;
};

/// min x3 s.t. P[x1 > xi, x2 > xi] >= 1 - eps, x_low <= x <= 1, x3 >= x1, x2;
/// CVaR beats Bonferroni.
ChanceProgram example2_problem(const Example2Config& cfg);
Example2Report run_incomparability_ex2(const Example2Config& cfg);

/// CSV writers used by the command-line tool; every number is printed in
/// shortest round-trip form.
std::string portfolio_experiment_csv(std::uint64_t seed, const SolveOptions& options);
std::string transport_experiment_csv(std::uint64_t seed, const SolveOptions& options);
std::string example1_csv(const Example1Report& r);
std::string example2_csv(const Example2Report& r);
std::string crossval_experiment_csv(std::uint64_t seed, const SolveOptions& options);

} // namespace drcc
