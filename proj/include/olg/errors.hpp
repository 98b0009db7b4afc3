#pragma once
#include <stdexcept>
#include <string>

namespace olg {

// Parameter or domain violation. The CLI maps these to exit code 2.
class invalid_parameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Numerical failure (bracketing, inversion, rank). CLI exit code 3.
class numeric_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A root bracket whose endpoint residuals do not straddle zero.
class bracket_error : public numeric_error {
public:
    bracket_error(const std::string& what, double lo_residual, double hi_residual)
        : numeric_error(what + " (endpoint residuals " + std::to_string(lo_residual) +
                        ", " + std::to_string(hi_residual) + ")"),
          lo_residual(lo_residual),
          hi_residual(hi_residual) {}

    double lo_residual;
    double hi_residual;
};

// A monotone inversion asked for a value outside the function's range.
class inversion_error : public numeric_error {
public:
    using numeric_error::numeric_error;
};

// Rank-deficient regressor matrix; `column` names the offending regressor.
class rank_error : public numeric_error {
public:
    rank_error(const std::string& what, std::string offending_column)
        : numeric_error(what), column(std::move(offending_column)) {}

    std::string column;
};

}  // namespace olg
