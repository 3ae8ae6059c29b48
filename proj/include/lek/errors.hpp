#pragma once

#include <stdexcept>
#include <string>

namespace lek {

// Invalid user input: out-of-range exponents, malformed domains, bad flags.
class ParameterError : public std::invalid_argument {
public:
    explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

// Numeric failure at runtime: quadrature non-convergence, shooting bracket
// failure, NaN in an energy evaluation.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// A requested computation exceeds a configured budget (grid node count).
class ResourceError : public std::runtime_error {
public:
    explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace lek
