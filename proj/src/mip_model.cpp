#include "drcc/mip_model.hpp"

#include <algorithm>
#include <cmath>

namespace drcc {

int MipModel::add_variable(std::string var_name, double lo, double hi, VarRole role, bool binary, double cost) {
    variables.push_back({std::move(var_name), lo, hi, binary, role});
    objective.push_back(cost);
    return num_variables() - 1;
}

int MipModel::add_row(std::string row_name, std::vector<std::pair<int, double>> terms, Sense sense, double rhs,
                      RowRole role) {
    rows.push_back({std::move(row_name), std::move(terms), sense, rhs, role});
    return num_rows() - 1;
}

void MipModel::add_cone(std::string cone_name, int head, std::vector<int> body) {
    cones.push_back({std::move(cone_name), head, std::move(body)});
}

void MipModel::note(const std::string& key, const std::string& value) {
    diagnostics.emplace_back(key, value);
}

int MipModel::num_binaries() const {
    return static_cast<int>(std::count_if(variables.begin(), variables.end(), [](const Variable& v) { return v.binary; }));
}

int MipModel::num_core_continuous() const {
    return static_cast<int>(std::count_if(variables.begin(), variables.end(), [](const Variable& v) {
        return !v.binary && v.role != VarRole::Auxiliary;
    }));
}

int MipModel::count(VarRole role) const {
    return static_cast<int>(
        std::count_if(variables.begin(), variables.end(), [role](const Variable& v) { return v.role == role; }));
}

int MipModel::count(RowRole role) const {
    return static_cast<int>(
        std::count_if(rows.begin(), rows.end(), [role](const LinearRow& r) { return r.role == role; }));
}

std::vector<int> MipModel::indices(VarRole role) const {
    std::vector<int> out;
    for (int j = 0; j < num_variables(); ++j) {
        if (variables[j].role == role) out.push_back(j);
    }
    return out;
}

void MipModel::validate() const {
    const int n = num_variables();
    if (static_cast<int>(objective.size()) != n) throw PreconditionError("objective length differs from variable count");
    for (const auto& v : variables) {
        if (std::isnan(v.lo) || std::isnan(v.hi) || v.lo > v.hi) {
            throw PreconditionError("variable " + v.name + " has inconsistent bounds");
        }
    }
    for (const auto& r : rows) {
        for (const auto& [j, coef] : r.terms) {
            if (j < 0 || j >= n) throw PreconditionError("row " + r.name + " references an undeclared variable");
            if (!std::isfinite(coef)) throw PreconditionError("row " + r.name + " has a non-finite coefficient");
        }
        if (std::isnan(r.rhs)) throw PreconditionError("row " + r.name + " has a NaN right-hand side");
    }
    for (const auto& c : cones) {
        if (c.head < 0 || c.head >= n) throw PreconditionError("cone " + c.name + " references an undeclared variable");
        for (int j : c.body) {
            if (j < 0 || j >= n) throw PreconditionError("cone " + c.name + " references an undeclared variable");
        }
    }
}

LpProblem MipModel::relaxation() const {
    if (!cones.empty()) throw PreconditionError("cone rows cannot be solved internally; export the model instead");
    validate();
    const int n = num_variables();
    const int m = num_rows();
    LpProblem lp;
    lp.A = Eigen::MatrixXd::Zero(m, n);
    lp.row_lo.resize(m);
    lp.row_hi.resize(m);
    for (int r = 0; r < m; ++r) {
        for (const auto& [j, coef] : rows[r].terms) lp.A(r, j) += coef;
        switch (rows[r].sense) {
        case Sense::LessEqual:
            lp.row_lo(r) = -kInf;
            lp.row_hi(r) = rows[r].rhs;
            break;
        case Sense::GreaterEqual:
            lp.row_lo(r) = rows[r].rhs;
            lp.row_hi(r) = kInf;
            break;
        case Sense::Equal:
            lp.row_lo(r) = rows[r].rhs;
            lp.row_hi(r) = rows[r].rhs;
            break;
        }
    }
    lp.col_lo.resize(n);
    lp.col_hi.resize(n);
    lp.cost.resize(n);
    for (int j = 0; j < n; ++j) {
        const auto& v = variables[j];
        lp.col_lo(j) = v.binary ? std::max(v.lo, 0.0) : v.lo;
        lp.col_hi(j) = v.binary ? std::min(v.hi, 1.0) : v.hi;
        lp.cost(j) = objective[j];
    }
    return lp;
}

} // namespace drcc
