#pragma once

#include <stdexcept>
#include <string>

namespace heatlab {

// Bad argument values (a >= b, empty lists, non-monotone inputs).
struct ArgumentError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Evaluation outside the domain of a profile, table or grid.
struct RangeError : std::out_of_range {
    using std::out_of_range::out_of_range;
};

// Quadrature, bisection or linear solve did not converge.
struct NumericFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A mathematical hypothesis of an operation is violated by the input.
struct PreconditionError : std::domain_error {
    using std::domain_error::domain_error;
};

struct UnsupportedError : std::logic_error {
    using std::logic_error::logic_error;
};

struct ConfigError : std::runtime_error {
    ConfigError(const std::string& msg, int line = 0)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg),
          line(line) {}
    int line;
};

}  // namespace heatlab
