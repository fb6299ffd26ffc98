#include "support/generators.hpp"

#include "drcc/model.hpp"

#include <doctest.h>
#include <json.hpp>

using namespace drcc;
using drcc::testing::random_individual;
using drcc::testing::random_joint;

namespace {

std::string small_problem(const std::string& polytope, const std::string& safety, const std::string& norm = "\"l1\"") {
    return R"({"objective": [1, 2], "polytope": )" + polytope + R"(, "epsilon": 0.1, "theta": 0.05, "norm": )" +
           norm + R"(, "samples": [[0.5], [1.5], [2.0]], "safety": )" + safety + "}";
}

const std::string kBox = R"({"G": [[1, 0], [-1, 0], [0, 1], [0, -1]], "h": [1, 1, 1, 1]})";
const std::string kIndividual = R"({"type": "individual", "A": [[1], [0]], "a": [0, 1], "b": [2], "b0": 1})";

} // namespace

TEST_CASE("norm exponents and names") {
    CHECK(Norm::l1().dual_exponent() == kInf);
    CHECK(Norm::linf().dual_exponent() == 1.0);
    const Norm p = Norm::lp(6, 4);
    CHECK(p.p_num == 3);
    CHECK(p.p_den == 2);
    CHECK(p.dual_exponent() == doctest::Approx(3.0));
    CHECK(p.name() == "l3/2");
    CHECK_THROWS_AS(Norm::lp(1, 1), ParseError);
    CHECK_THROWS_AS(Norm::lp(-3, 1), ParseError);
}

TEST_CASE("parse reads an individual problem") {
    const ChanceProgram cp = parse_problem(small_problem(kBox, kIndividual));
    CHECK(cp.num_decisions() == 2);
    CHECK(cp.num_samples() == 3);
    CHECK(cp.sample_dimension() == 1);
    REQUIRE(cp.is_individual());
    CHECK(cp.individual().b(0) == 2.0);
    CHECK(cp.ball.norm == Norm::l1());
    CHECK(cp.ball.radius == 0.05);
}

TEST_CASE("parse accepts the p-norm spellings") {
    for (const std::string norm : {R"({"lp": 3})", R"({"lp": "3/2"})", R"({"lp": [3, 2]})", R"({"lp": 1.5})"}) {
        const ChanceProgram cp = parse_problem(small_problem(kBox, kIndividual, norm));
        CHECK(cp.ball.norm.kind == Norm::Kind::Lp);
    }
    CHECK(parse_problem(small_problem(kBox, kIndividual, R"({"lp": 1.5})")).ball.norm == Norm::lp(3, 2));
    CHECK_THROWS_AS(parse_problem(small_problem(kBox, kIndividual, R"({"lp": 1})")), ParseError);
    CHECK_THROWS_AS(parse_problem(small_problem(kBox, kIndividual, R"("l7")")), ParseError);
}

TEST_CASE("parse rejects malformed documents") {
    CHECK_THROWS_AS(parse_problem("{"), ParseError);
    const std::string wrong_b = R"({"type": "individual", "A": [[1], [0]], "a": [0, 1], "b": [2, 3], "b0": 1})";
    CHECK_THROWS_AS(parse_problem(small_problem(kBox, wrong_b)), ParseError);
    const std::string flat = R"({"type": "joint_rhs", "rows": [{"a": [1, 0], "b": [0], "b0": 1}]})";
    CHECK_THROWS_WITH_AS(parse_problem(small_problem(kBox, flat)), doctest::Contains("uncertainty-free"), ParseError);
    std::string doc = small_problem(kBox, kIndividual);
    doc.replace(doc.find("0.1"), 3, "1.5");
    CHECK_THROWS_AS(parse_problem(doc), ParseError);
}

TEST_CASE("unbounded and empty polytopes are reported") {
    const std::string half = R"({"G": [[1, 0], [-1, 0], [0, 1]], "h": [1, 1, 1]})";
    try {
        parse_problem(small_problem(half, kIndividual));
        FAIL("expected UnboundedSetError");
    } catch (const UnboundedSetError& e) {
        CHECK(e.coordinate() == 2);
    }
    const std::string empty = R"({"G": [[1, 0], [-1, 0], [0, 1], [0, -1]], "h": [1, -2, 1, 1]})";
    CHECK_THROWS_AS(parse_problem(small_problem(empty, kIndividual)), InfeasibleSetError);
}

TEST_CASE("validate_bounded returns the coordinate ranges") {
    const ChanceProgram cp = parse_problem(small_problem(kBox, kIndividual));
    const Box box = validate_bounded(cp.feasible);
    CHECK(box.lo(0) == doctest::Approx(-1.0));
    CHECK(box.hi(1) == doctest::Approx(1.0));
}

TEST_CASE("parse and serialize round trip exactly") {
    Rng rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        const ChanceProgram cp = trial % 2 ? random_joint(rng) : random_individual(rng);
        const std::string text = serialize_problem(cp);
        const ChanceProgram back = parse_problem(text);
        CHECK(back.cost == cp.cost);
        CHECK(back.feasible.G == cp.feasible.G);
        CHECK(back.feasible.h == cp.feasible.h);
        CHECK(back.ball.center.samples() == cp.ball.center.samples());
        CHECK(back.ball.radius == cp.ball.radius);
        CHECK(back.ball.norm == cp.ball.norm);
        CHECK(back.epsilon == cp.epsilon);
        CHECK(serialize_problem(back) == text);
    }
}

TEST_CASE("training subsets keep the requested order") {
    Matrix m(3, 1);
    m << 1, 2, 3;
    const TrainingSet ts(m);
    const TrainingSet sub = ts.subset({2, 0});
    CHECK(sub.size() == 2);
    CHECK(sub.sample(0)(0) == 3.0);
    CHECK_THROWS_AS(ts.subset({3}), PreconditionError);
    CHECK_THROWS_AS(TrainingSet(Matrix(0, 2)), ParseError);
}
