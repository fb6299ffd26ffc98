#include "drcc/model.hpp"

#include "drcc/simplex.hpp"

#include <json.hpp>

#include <cmath>
#include <numeric>

namespace drcc {

using nlohmann::json;

Norm Norm::lp(long num, long den) {
    if (num <= 0 || den <= 0) throw ParseError("p-norm exponent must be a ratio of positive integers");
    if (num <= den) throw ParseError("p-norm exponent must exceed 1");
    const long g = std::gcd(num, den);
    return {Kind::Lp, num / g, den / g};
}

double Norm::exponent() const {
    switch (kind) {
    case Kind::L1: return 1.0;
    case Kind::L2: return 2.0;
    case Kind::Linf: return kInf;
    case Kind::Lp: return static_cast<double>(p_num) / static_cast<double>(p_den);
    }
    return 2.0;
}

double Norm::dual_exponent() const {
    switch (kind) {
    case Kind::L1: return kInf;
    case Kind::L2: return 2.0;
    case Kind::Linf: return 1.0;
    case Kind::Lp: return static_cast<double>(p_num) / static_cast<double>(p_num - p_den);
    }
    return 2.0;
}

std::string Norm::name() const {
    switch (kind) {
    case Kind::L1: return "l1";
    case Kind::L2: return "l2";
    case Kind::Linf: return "linf";
    case Kind::Lp:
        return p_den == 1 ? "l" + std::to_string(p_num)
                          : "l" + std::to_string(p_num) + "/" + std::to_string(p_den);
    }
    return "l2";
}

TrainingSet::TrainingSet(Matrix samples) : samples_(std::move(samples)) {
    if (samples_.rows() < 1) throw ParseError("training set needs at least one sample");
    if (samples_.cols() < 1) throw ParseError("samples must have positive dimension");
    if (!samples_.allFinite()) throw ParseError("samples must be finite");
}

TrainingSet TrainingSet::subset(const std::vector<int>& rows) const {
    Matrix out(static_cast<Eigen::Index>(rows.size()), samples_.cols());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        if (rows[k] < 0 || rows[k] >= samples_.rows()) throw PreconditionError("sample index out of range");
        out.row(static_cast<Eigen::Index>(k)) = samples_.row(rows[k]);
    }
    return TrainingSet(std::move(out));
}

namespace {

void require(bool ok, const std::string& message) {
    if (!ok) throw ParseError(message);
}

std::string shape(Eigen::Index r, Eigen::Index c) {
    return std::to_string(r) + "x" + std::to_string(c);
}

} // namespace

void validate_structure(const ChanceProgram& cp) {
    const Eigen::Index L = cp.num_decisions();
    const Eigen::Index K = cp.sample_dimension();
    require(L >= 1, "objective must have at least one entry");
    require(cp.cost.allFinite(), "objective must be finite");
    require(cp.ball.center.size() >= 1, "training set needs at least one sample");
    require(cp.epsilon > 0.0 && cp.epsilon < 1.0, "epsilon must lie strictly between 0 and 1");
    require(std::isfinite(cp.ball.radius) && cp.ball.radius >= 0.0, "theta must be finite and nonnegative");
    require(cp.feasible.G.cols() == L,
            "polytope G has " + std::to_string(cp.feasible.G.cols()) + " columns, expected " + std::to_string(L));
    require(cp.feasible.G.rows() == cp.feasible.h.size(), "polytope G and h row counts differ");
    require(cp.feasible.G.allFinite() && cp.feasible.h.allFinite(), "polytope data must be finite");

    if (cp.is_individual()) {
        const auto& s = cp.individual();
        require(s.A.rows() == L && s.A.cols() == K,
                "safety A is " + shape(s.A.rows(), s.A.cols()) + ", expected " + shape(L, K));
        require(s.a.size() == L, "safety a must have length " + std::to_string(L));
        require(s.b.size() == K, "safety b must have length " + std::to_string(K));
        require(s.A.allFinite() && s.a.allFinite() && s.b.allFinite() && std::isfinite(s.b0),
                "safety data must be finite");
    } else {
        const auto& rows = cp.joint().rows;
        require(!rows.empty(), "joint safety needs at least one row");
        for (std::size_t m = 0; m < rows.size(); ++m) {
            const auto& r = rows[m];
            const std::string where = "joint row " + std::to_string(m + 1);
            require(r.a.size() == L, where + ": a must have length " + std::to_string(L));
            require(r.b.size() == K, where + ": b must have length " + std::to_string(K));
            require(r.a.allFinite() && r.b.allFinite() && std::isfinite(r.b0), where + ": data must be finite");
            require(r.b.cwiseAbs().maxCoeff() > 0.0,
                    where + " is an uncertainty-free row (b = 0); fold it into the polytope constraints instead");
        }
    }
}

Box validate_bounded(const Polytope& p) {
    const Eigen::Index L = p.dimension();
    LpProblem lp;
    lp.A = p.G;
    lp.row_lo = Vector::Constant(p.G.rows(), -kInf);
    lp.row_hi = p.h;
    lp.col_lo = Vector::Constant(L, -kInf);
    lp.col_hi = Vector::Constant(L, kInf);
    Box box{Vector(L), Vector(L)};
    for (Eigen::Index j = 0; j < L; ++j) {
        for (double sense : {1.0, -1.0}) {
            lp.cost = Vector::Zero(L);
            lp.cost(j) = sense;
            const LpSolution sol = simplex_solve(lp);
            if (sol.status == LpStatus::Infeasible) throw InfeasibleSetError("polytope is empty");
            if (sol.status == LpStatus::Unbounded) {
                throw UnboundedSetError(static_cast<int>(j + 1),
                                        "polytope is unbounded in coordinate " + std::to_string(j + 1));
            }
            (sense > 0 ? box.lo(j) : box.hi(j)) = sol.x(j);
        }
    }
    return box;
}

namespace {

Vector read_vector(const json& node, const std::string& what) {
    require(node.is_array(), what + " must be an array");
    Vector v(static_cast<Eigen::Index>(node.size()));
    for (std::size_t i = 0; i < node.size(); ++i) {
        require(node[i].is_number(), what + " must contain numbers");
        v(static_cast<Eigen::Index>(i)) = node[i].get<double>();
    }
    return v;
}

Matrix read_matrix(const json& node, const std::string& what, Eigen::Index cols_if_empty) {
    require(node.is_array(), what + " must be an array of rows");
    if (node.empty()) return Matrix(0, cols_if_empty);
    const std::size_t cols = node[0].is_array() ? node[0].size() : 0;
    Matrix m(static_cast<Eigen::Index>(node.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < node.size(); ++r) {
        require(node[r].is_array() && node[r].size() == cols, what + " rows must have equal length");
        m.row(static_cast<Eigen::Index>(r)) = read_vector(node[r], what).transpose();
    }
    return m;
}

double read_number(const json& doc, const char* key) {
    require(doc.contains(key) && doc[key].is_number(), std::string("missing numeric field \"") + key + "\"");
    return doc[key].get<double>();
}

Norm parse_exponent(const json& p) {
    if (p.is_number_integer()) return Norm::lp(p.get<long>(), 1);
    if (p.is_array() && p.size() == 2 && p[0].is_number_integer() && p[1].is_number_integer()) {
        return Norm::lp(p[0].get<long>(), p[1].get<long>());
    }
    if (p.is_string()) {
        const std::string s = p.get<std::string>();
        const auto slash = s.find('/');
        try {
            if (slash == std::string::npos) return Norm::lp(std::stol(s), 1);
            return Norm::lp(std::stol(s.substr(0, slash)), std::stol(s.substr(slash + 1)));
        } catch (const std::logic_error&) {
            throw ParseError("cannot read p-norm exponent \"" + s + "\"");
        }
    }
    if (p.is_number()) {
        const double value = p.get<double>();
        for (long den = 1; den <= 1000000; ++den) {
            const double num = std::round(value * static_cast<double>(den));
            if (std::abs(num - value * static_cast<double>(den)) <= 1e-9 * std::max(1.0, num)) {
                return Norm::lp(static_cast<long>(num), den);
            }
        }
        throw ParseError("p-norm exponent is not a simple rational");
    }
    throw ParseError("p-norm exponent must be a number, \"num/den\" or [num, den]");
}

Norm parse_norm(const json& node) {
    if (node.is_string()) {
        const std::string s = node.get<std::string>();
        if (s == "l1") return Norm::l1();
        if (s == "l2") return Norm::l2();
        if (s == "linf") return Norm::linf();
        throw ParseError("unknown norm \"" + s + "\"");
    }
    require(node.is_object() && node.contains("lp"), "norm must be \"l1\", \"l2\", \"linf\" or {\"lp\": p}");
    return parse_exponent(node["lp"]);
}

json norm_to_json(const Norm& norm) {
    switch (norm.kind) {
    case Norm::Kind::L1: return "l1";
    case Norm::Kind::L2: return "l2";
    case Norm::Kind::Linf: return "linf";
    case Norm::Kind::Lp:
        if (norm.p_den == 1) return json{{"lp", norm.p_num}};
        return json{{"lp", json::array({norm.p_num, norm.p_den})}};
    }
    return "l2";
}

json vector_to_json(const Vector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

json matrix_to_json(const Matrix& m) {
    json out = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(vector_to_json(m.row(r).transpose()));
    return out;
}

} // namespace

ChanceProgram parse_problem(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what());
    }
    require(doc.is_object(), "problem document must be a JSON object");
    for (const char* key : {"objective", "polytope", "epsilon", "theta", "norm", "samples", "safety"}) {
        require(doc.contains(key), std::string("missing field \"") + key + "\"");
    }

    ChanceProgram cp;
    cp.cost = read_vector(doc["objective"], "objective");
    const auto L = cp.cost.size();
    const json& poly = doc["polytope"];
    require(poly.is_object() && poly.contains("G") && poly.contains("h"), "polytope must have \"G\" and \"h\"");
    cp.feasible.G = read_matrix(poly["G"], "polytope G", L);
    cp.feasible.h = read_vector(poly["h"], "polytope h");
    cp.epsilon = read_number(doc, "epsilon");
    cp.ball.radius = read_number(doc, "theta");
    cp.ball.norm = parse_norm(doc["norm"]);
    cp.ball.center = TrainingSet(read_matrix(doc["samples"], "samples", 0));
    const auto K = cp.ball.center.dimension();

    const json& safety = doc["safety"];
    require(safety.is_object() && safety.contains("type") && safety["type"].is_string(),
            "safety must be an object with a \"type\"");
    const std::string type = safety["type"].get<std::string>();
    if (type == "individual") {
        for (const char* key : {"A", "a", "b", "b0"}) {
            require(safety.contains(key), std::string("individual safety is missing \"") + key + "\"");
        }
        IndividualSafety s;
        s.A = read_matrix(safety["A"], "safety A", K);
        s.a = read_vector(safety["a"], "safety a");
        s.b = read_vector(safety["b"], "safety b");
        s.b0 = read_number(safety, "b0");
        cp.safety = std::move(s);
    } else if (type == "joint_rhs") {
        require(safety.contains("rows") && safety["rows"].is_array(), "joint_rhs safety needs \"rows\"");
        JointRhsSafety s;
        for (const json& row : safety["rows"]) {
            require(row.is_object() && row.contains("a") && row.contains("b") && row.contains("b0"),
                    "each joint row needs \"a\", \"b\" and \"b0\"");
            s.rows.push_back({read_vector(row["a"], "joint row a"), read_vector(row["b"], "joint row b"),
                              read_number(row, "b0")});
        }
        cp.safety = std::move(s);
    } else {
        throw ParseError("unknown safety type \"" + type + "\"");
    }

    validate_structure(cp);
    validate_bounded(cp.feasible);
    return cp;
}

std::string serialize_problem(const ChanceProgram& cp) {
    json doc;
    doc["objective"] = vector_to_json(cp.cost);
    doc["polytope"] = {{"G", matrix_to_json(cp.feasible.G)}, {"h", vector_to_json(cp.feasible.h)}};
    doc["epsilon"] = cp.epsilon;
    doc["theta"] = cp.ball.radius;
    doc["norm"] = norm_to_json(cp.ball.norm);
    doc["samples"] = matrix_to_json(cp.ball.center.samples());
    if (cp.is_individual()) {
        const auto& s = cp.individual();
        doc["safety"] = {{"type", "individual"},
                         {"A", matrix_to_json(s.A)},
                         {"a", vector_to_json(s.a)},
                         {"b", vector_to_json(s.b)},
                         {"b0", s.b0}};
    } else {
        json rows = json::array();
        for (const auto& r : cp.joint().rows) {
            rows.push_back({{"a", vector_to_json(r.a)}, {"b", vector_to_json(r.b)}, {"b0", r.b0}});
        }
        doc["safety"] = {{"type", "joint_rhs"}, {"rows", rows}};
    }
    return doc.dump(2) + "\n";
}

} // namespace drcc
