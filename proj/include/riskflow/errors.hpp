#pragma once

#include <stdexcept>
#include <string>

namespace riskflow {

/// Malformed or inconsistent scenario/config input. CLI exit code 1.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Coupling constraint violation (sign or stability inequality). CLI exit code 2.
class ConstraintError : public std::runtime_error {
public:
    explicit ConstraintError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure at run time (CFL refusal, NaN/Inf, blow-up). CLI exit code 3.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace riskflow
