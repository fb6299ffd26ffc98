#pragma once

#include "drcc/types.hpp"

#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace drcc {

/// Norm used for the Wasserstein transport cost on R^K.
struct Norm {
    enum class Kind { L1, L2, Linf, Lp };

    Kind kind = Kind::L2;
    long p_num = 2; ///< numerator of p, meaningful for Kind::Lp
    long p_den = 1; ///< denominator of p

    static Norm l1() { return {Kind::L1, 1, 1}; }
    static Norm l2() { return {Kind::L2, 2, 1}; }
    static Norm linf() { return {Kind::Linf, 0, 1}; }
    /// Rational p-norm, p = num/den > 1. Throws ParseError otherwise.
    static Norm lp(long num, long den);

    /// Exponent of the norm (infinity for Linf).
    double exponent() const;
    /// Exponent q of the dual norm, 1/p + 1/q = 1.
    double dual_exponent() const;
    std::string name() const;

    friend bool operator==(const Norm&, const Norm&) = default;
};

/// Empirical samples, one per row (N x K).
class TrainingSet {
public:
    TrainingSet() = default;
    explicit TrainingSet(Matrix samples);

    const Matrix& samples() const { return samples_; }
    auto sample(Eigen::Index i) const { return samples_.row(i).transpose(); }
    Eigen::Index size() const { return samples_.rows(); }
    Eigen::Index dimension() const { return samples_.cols(); }

    /// Rows selected by index, in the given order.
    TrainingSet subset(const std::vector<int>& rows) const;

private:
    Matrix samples_;
};

struct WassersteinBall {
    double radius = 0.0;
    Norm norm;
    TrainingSet center;
};

/// {x : G x <= h}.
struct Polytope {
    Matrix G;
    Vector h;

    Eigen::Index dimension() const { return G.cols(); }
};

/// Coordinate-wise bounding box of a polytope.
struct Box {
    Vector lo;
    Vector hi;
};

/// Safety set {xi : (A xi + a)^T x < b^T xi + b0}, A is L x K.
struct IndividualSafety {
    Matrix A;
    Vector a;
    Vector b;
    double b0 = 0.0;
};

/// One safety condition a^T x < b^T xi + b0 with b != 0.
struct JointRow {
    Vector a;
    Vector b;
    double b0 = 0.0;
};

/// Safety set {xi : a_m^T x < b_m^T xi + b0_m for all m}.
struct JointRhsSafety {
    std::vector<JointRow> rows;
};

using Safety = std::variant<IndividualSafety, JointRhsSafety>;

struct ChanceProgram {
    Vector cost;
    Polytope feasible;
    Safety safety;
    double epsilon = 0.1;
    WassersteinBall ball;

    Eigen::Index num_decisions() const { return cost.size(); }
    Eigen::Index num_samples() const { return ball.center.size(); }
    Eigen::Index sample_dimension() const { return ball.center.dimension(); }
    bool is_individual() const { return std::holds_alternative<IndividualSafety>(safety); }
    bool is_joint() const { return std::holds_alternative<JointRhsSafety>(safety); }
    const IndividualSafety& individual() const { return std::get<IndividualSafety>(safety); }
    const JointRhsSafety& joint() const { return std::get<JointRhsSafety>(safety); }
};

/// Checks every dimension and range invariant except boundedness of X.
/// Throws ParseError.
void validate_structure(const ChanceProgram& cp);

/// Coordinate-wise min/max over the polytope via 2L LP solves.
/// Throws InfeasibleSetError or UnboundedSetError.
Box validate_bounded(const Polytope& p);

/// Parses and fully validates a JSON problem document.
ChanceProgram parse_problem(std::string_view text);

/// Serializes to the JSON problem format (doubles round-trip exactly).
std::string serialize_problem(const ChanceProgram& cp);

} // namespace drcc
