#include "support/generators.hpp"
#include "support/oracles.hpp"

#include "drcc/oracle.hpp"
#include "drcc/reform.hpp"

#include <doctest.h>

using namespace drcc;
using namespace drcc::testing;

namespace {

InstanceShape small_shape() {
    InstanceShape s;
    s.max_samples = 7;
    return s;
}

double value_of(const SolveResult& r) { return r.status == SolveStatus::Optimal ? r.objective : kInf; }

/// a <= b up to a relative tolerance; infinite values compare exactly.
bool at_most(double a, double b, double tol) {
    if (std::isinf(a) || std::isinf(b)) return a <= b;
    return a <= b + tol * std::max(1.0, std::abs(b));
}

bool close(double a, double b, double tol) {
    if (std::isinf(a) || std::isinf(b)) return a == b;
    return std::abs(a - b) <= tol * std::max(1.0, std::abs(b));
}

} // namespace

TEST_CASE("model sizes of the exact formulations") {
    Rng rng(61);
    for (int trial = 0; trial < 30; ++trial) {
        const ChanceProgram ind = random_individual(rng);
        const int N = static_cast<int>(ind.num_samples());
        const int L = static_cast<int>(ind.num_decisions());
        const MipModel a = build_individual_mip(ind, derive_big_m(ind));
        CHECK(a.num_binaries() == N);
        CHECK(a.num_core_continuous() == L + N + 1);
        CHECK(a.count(RowRole::Core) == 2 * N + 1);
        CHECK(a.count(RowRole::Polytope) == ind.feasible.G.rows());

        const ChanceProgram joint = random_joint(rng);
        const int Nj = static_cast<int>(joint.num_samples());
        const int M = static_cast<int>(joint.joint().rows.size());
        const MipModel b = build_joint_rhs_mip(joint, derive_big_m(joint));
        CHECK(b.num_binaries() == Nj);
        CHECK(b.num_core_continuous() == static_cast<int>(joint.num_decisions()) + 2 * Nj + 1);
        CHECK(b.count(RowRole::Core) == Nj * (M + 2) + 1);
    }
}

TEST_CASE("big-M bounds every margin over the box") {
    Rng rng(62);
    for (int trial = 0; trial < 50; ++trial) {
        const ChanceProgram cp = random_individual(rng);
        const BigM m = derive_big_m(cp);
        CHECK(m.value == 2.0 * (m.expression_bound + m.threshold_bound));
        for (int k = 0; k < 20; ++k) {
            Vector x(cp.num_decisions());
            for (Eigen::Index l = 0; l < x.size(); ++l) x(l) = rng.uniform(m.box.lo(l), m.box.hi(l));
            const auto& s = cp.individual();
            for (Eigen::Index i = 0; i < cp.num_samples(); ++i) {
                const Vector xi = cp.ball.center.sample(i);
                const double e = s.b.dot(xi) + s.b0 - (s.A * xi + s.a).dot(x);
                CHECK(std::abs(e) <= m.expression_bound + 1e-12);
            }
        }
    }
}

TEST_CASE("preconditions of the builders") {
    Rng rng(63);
    ChanceProgram cp = random_individual(rng);
    cp.ball.radius = 0.0;
    CHECK_THROWS_WITH_AS(solve_exact(cp), doctest::Contains("classical"), PreconditionError);
    cp.ball.radius = 0.1;
    cp.ball.norm = Norm::lp(3, 1);
    IndividualSafety s = cp.individual();
    s.A.setConstant(0.1);
    cp.safety = s;
    CHECK_THROWS_AS(build_individual_mip(cp, derive_big_m(cp)), PreconditionError);
    s.A.setZero();
    cp.safety = s;
    CHECK_NOTHROW(build_individual_mip(cp, derive_big_m(cp)));
    CHECK_THROWS_AS(build_kappa_model(cp, Vector::Constant(cp.num_samples(), 1.5)), PreconditionError);
}

TEST_CASE("exact models agree with pattern enumeration") {
    Rng rng(64);
    for (int trial = 0; trial < 30; ++trial) {
        const ChanceProgram cp = trial % 2 ? random_joint(rng, small_shape()) : random_individual(rng, small_shape());
        const EnumerationResult e = enumerate_patterns(cp);
        const SolveResult r = solve_exact(cp);
        CHECK(r.has_solution() == e.feasible);
        if (e.feasible) {
            CHECK(close(r.objective, e.objective, 1e-6));
            // the decision passes the deterministic test
            const FeasibilityReport f = check_chance_feasible(cp.ball.center, unsafe_halfspaces(cp, r.x),
                                                              cp.ball.radius, cp.epsilon, cp.ball.norm);
            CHECK(f.slack >= -1e-7);
        }
    }
}

TEST_CASE("exact value is monotone in the radius and in epsilon") {
    Rng rng(65);
    for (int trial = 0; trial < 10; ++trial) {
        ChanceProgram cp = trial % 2 ? random_joint(rng) : random_individual(rng);
        double last = -kInf;
        for (int k = 1; k <= 10; ++k) {
            cp.ball.radius = 0.03 * k;
            const double v = value_of(solve_exact(cp));
            CHECK(at_most(last, v, 1e-7));
            last = v;
        }
        cp.ball.radius = 0.05;
        last = kInf;
        for (int k = 1; k <= 8; ++k) {
            cp.epsilon = 0.05 * k;
            const double v = value_of(solve_exact(cp));
            CHECK(at_most(v, last, 1e-7));
            last = v;
        }
    }
}

TEST_CASE("uniform slopes: the value falls as kappa rises to one") {
    Rng rng(66);
    for (int trial = 0; trial < 20; ++trial) {
        const ChanceProgram cp = random_individual(rng);
        double last = kInf;
        for (int k = 1; k <= 10; ++k) {
            const Vector kappa = Vector::Constant(cp.num_samples(), 0.1 * k);
            const double v = value_of(solve_lp(build_kappa_model(cp, kappa)));
            CHECK(at_most(v, last, 1e-8));
            last = v;
        }
    }
}

TEST_CASE("indicator slopes recover the exact value") {
    Rng rng(67);
    for (int trial = 0; trial < 20; ++trial) {
        const ChanceProgram cp = random_individual(rng, small_shape());
        const SolveResult exact = solve_exact(cp);
        if (!exact.has_solution()) continue;
        Vector kappa(cp.num_samples());
        for (Eigen::Index i = 0; i < kappa.size(); ++i) kappa(i) = 1.0 - exact.q[static_cast<std::size_t>(i)];
        CHECK(close(value_of(solve_lp(build_kappa_model(cp, kappa))), exact.objective, 1e-7));
        for (int k = 0; k < 10; ++k) {
            const Vector random = random_vector(rng, cp.num_samples(), 0.0, 1.0);
            CHECK(value_of(solve_lp(build_kappa_model(cp, random))) >= exact.objective - 1e-7);
        }
    }
}

TEST_CASE("collapsed normal is reported or emulated") {
    // A = 1, b = 0.5: the normal b - A x vanishes at x = 0.5, where every margin is zero
    ChanceProgram cp;
    cp.cost = Vector::Constant(1, -1.0);
    cp.feasible.G = Matrix(2, 1);
    cp.feasible.G << 1, -1;
    cp.feasible.h = Vector(2);
    cp.feasible.h << 1, 0;
    cp.safety = IndividualSafety{Matrix::Constant(1, 1, 1.0), Vector::Zero(1), Vector::Constant(1, 0.5), 0.0};
    cp.epsilon = 0.2;
    Matrix samples(5, 1);
    samples << 1.0, 1.2, 1.4, 1.6, 2.0;
    cp.ball = {0.05, Norm::l1(), TrainingSet(samples)};
    try {
        solve_exact(cp);
        FAIL("expected DegenerateNormalError");
    } catch (const DegenerateNormalError& e) {
        CHECK(e.variants().size() == 3);
    }
    ExactOptions opt;
    opt.emulate_strict = true;
    const SolveResult r = solve_exact(cp, opt);
    REQUIRE(r.status == SolveStatus::Optimal);
    CHECK(r.x(0) == doctest::Approx(0.5 - 1e-6).epsilon(1e-9));
}

TEST_CASE("classical scenario model respects its violation budget") {
    Rng rng(68);
    for (int trial = 0; trial < 20; ++trial) {
        const ChanceProgram cp = trial % 2 ? random_joint(rng) : random_individual(rng);
        const SolveResult r = solve_classical(cp);
        REQUIRE(r.status == SolveStatus::Optimal);
        int violated = 0;
        for (Eigen::Index i = 0; i < cp.num_samples(); ++i) {
            const Vector xi = cp.ball.center.sample(i);
            for (const Halfspace& h : unsafe_halfspaces(cp, r.x)) {
                if (h.normal.dot(xi) - h.offset < -1e-7) {
                    ++violated;
                    break;
                }
            }
        }
        CHECK(violated <= static_cast<int>(std::floor(cp.epsilon * cp.num_samples() + 1e-9)));
    }
}

TEST_CASE("Bonferroni thresholds match the breakpoint scan") {
    Rng rng(69);
    for (int trial = 0; trial < 40; ++trial) {
        const UnionCase c = random_union(rng, 3, 12, 1);
        const double risk = rng.uniform(0.02, 0.5);
        const Vector& b = c.unsafe[0].normal;
        const double eta = bonferroni_threshold(c.samples, b, 0.0, risk, c.theta, c.norm);
        CHECK(eta == doctest::Approx(scan_threshold(c.samples, b, risk, c.theta, c.norm)).epsilon(1e-6));
        const double sorted = bonferroni_threshold(c.samples, b, 0.0, risk, c.theta, c.norm, 0);
        CHECK(std::abs(sorted - eta) <= 1e-6);
    }
}

TEST_CASE("Bonferroni plans validate their risks") {
    Rng rng(70);
    InstanceShape shape;
    shape.max_rows = 2;
    ChanceProgram cp = random_joint(rng, shape);
    while (cp.joint().rows.size() != 2) cp = random_joint(rng, shape);
    CHECK_THROWS_AS(make_bonferroni_plan(cp, std::vector<double>{0.5, 0.5}), PreconditionError);
    const BonferroniPlan plan = make_bonferroni_plan(cp, std::vector<double>{cp.epsilon, 0.0});
    CHECK(std::isinf(plan.thresholds[1]));
    CHECK(solve_bonferroni(cp, plan).status == SolveStatus::Infeasible);
}

TEST_CASE("cvar equals the unit-slope model") {
    Rng rng(71);
    for (int trial = 0; trial < 30; ++trial) {
        const ChanceProgram cp = trial % 2 ? random_joint(rng) : random_individual(rng);
        const Vector ones = Vector::Ones(cp.num_samples());
        CHECK(close(value_of(solve_cvar(cp)), value_of(solve_lp(build_kappa_model(cp, ones))), 1e-8));
    }
}

TEST_CASE("approximations are conservative") {
    Rng rng(72);
    for (int trial = 0; trial < 30; ++trial) {
        const ChanceProgram cp = trial % 2 ? random_joint(rng, small_shape()) : random_individual(rng, small_shape());
        const double exact = value_of(solve_exact(cp));
        const SolveResult cvar = solve_cvar(cp);
        CHECK(at_most(exact, value_of(cvar), 1e-7));
        if (cvar.has_solution()) {
            CHECK(check_chance_feasible(cp.ball.center, unsafe_halfspaces(cp, cvar.x), cp.ball.radius, cp.epsilon,
                                        cp.ball.norm)
                      .slack >= -1e-7);
        }
        if (cp.is_joint()) {
            const SolveResult bon = solve_bonferroni(cp, make_bonferroni_plan(cp));
            CHECK(at_most(exact, value_of(bon), 1e-7));
        }
    }
}
