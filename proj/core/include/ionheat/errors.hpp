#pragma once

#include <stdexcept>
#include <string>

namespace ionheat {

/// Base class for all ionheat errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid argument or violated physical invariant.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Numeric range problem: overflow, truncation ceiling, unacceptable leakage.
class NumericError : public Error {
public:
    using Error::Error;
};

/// A fitting procedure failed: no solution, ill-posed system, flat
/// likelihood, or non-convergence after all starts.
class FitError : public Error {
public:
    using Error::Error;
};

/// File or CSV format problem.
class IoError : public Error {
public:
    using Error::Error;
};

/// Configuration parse or validation problem.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace ionheat
