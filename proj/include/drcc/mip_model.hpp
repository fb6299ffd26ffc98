#pragma once

#include "drcc/simplex.hpp"
#include "drcc/types.hpp"

#include <string>
#include <utility>
#include <vector>

namespace drcc {

/// What a variable stands for in the reformulation it came from.
enum class VarRole {
    Decision,  ///< x
    Slack,     ///< s_i
    Threshold, ///< t (or tau in CVaR models)
    Distance,  ///< p_i
    Indicator, ///< q_i / y_i
    Auxiliary, ///< dual-norm epigraph and CVaR helpers
};

enum class RowRole {
    Core,      ///< rows counted as part of the reformulation proper
    Auxiliary, ///< dual-norm epigraph rows
    Polytope,  ///< G x <= h
};

enum class Sense { LessEqual, GreaterEqual, Equal };

struct Variable {
    std::string name;
    double lo = 0.0;
    double hi = kInf;
    bool binary = false;
    VarRole role = VarRole::Auxiliary;
};

struct LinearRow {
    std::string name;
    std::vector<std::pair<int, double>> terms;
    Sense sense = Sense::LessEqual;
    double rhs = 0.0;
    RowRole role = RowRole::Core;
};

/// head >= || body ||_2
struct ConeRow {
    std::string name;
    int head = 0;
    std::vector<int> body;
};

/// Solver-agnostic model: minimize objective^T v + objective_offset.
class MipModel {
public:
    std::string name = "model";
    std::vector<Variable> variables;
    std::vector<LinearRow> rows;
    std::vector<ConeRow> cones;
    std::vector<double> objective;
    double objective_offset = 0.0;
    /// Free-form key/value notes emitted by the builder (e.g. big-M values).
    std::vector<std::pair<std::string, std::string>> diagnostics;

    int add_variable(std::string var_name, double lo, double hi, VarRole role, bool binary = false,
                     double cost = 0.0);
    int add_row(std::string row_name, std::vector<std::pair<int, double>> terms, Sense sense, double rhs,
                RowRole role = RowRole::Core);
    void add_cone(std::string cone_name, int head, std::vector<int> body);
    void note(const std::string& key, const std::string& value);

    int num_variables() const { return static_cast<int>(variables.size()); }
    int num_rows() const { return static_cast<int>(rows.size()); }
    int num_binaries() const;
    /// Continuous variables excluding auxiliaries.
    int num_core_continuous() const;
    int count(VarRole role) const;
    int count(RowRole role) const;
    /// Indices of the variables with the given role, in declaration order.
    std::vector<int> indices(VarRole role) const;

    /// Throws PreconditionError on dangling indices or inconsistent bounds.
    void validate() const;

    /// LP relaxation (binaries relaxed to [0,1]). Throws on cone rows.
    LpProblem relaxation() const;
};

} // namespace drcc
