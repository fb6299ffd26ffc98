#pragma once

#include <Eigen/Dense>

#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace drcc {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent problem data.
class ParseError : public Error {
public:
    using Error::Error;
};

/// A caller violated an operation's precondition (e.g. theta <= 0).
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// The feasible polytope has an unbounded coordinate.
class UnboundedSetError : public Error {
public:
    UnboundedSetError(int coordinate, const std::string& what)
        : Error(what), coordinate_(coordinate) {}
    /// One-based index of the first unbounded coordinate.
    int coordinate() const { return coordinate_; }

private:
    int coordinate_;
};

/// The feasible polytope is empty.
class InfeasibleSetError : public Error {
public:
    using Error::Error;
};

/// The LP engine hit a singular basis.
class NumericalError : public Error {
public:
    NumericalError(int row, const std::string& what) : Error(what), row_(row) {}
    int row() const { return row_; }

private:
    int row_;
};

/// An individual safety condition collapsed (A^T x = b) at the optimum and
/// the chance constraint there could not be settled. Carries the 2K+1
/// restricted variants that must be solved to recover an optimum.
class DegenerateNormalError : public Error {
public:
    DegenerateNormalError(const std::string& what, std::vector<std::string> variants)
        : Error(what), variants_(std::move(variants)) {}
    const std::vector<std::string>& variants() const { return variants_; }

private:
    std::vector<std::string> variants_;
};

} // namespace drcc
