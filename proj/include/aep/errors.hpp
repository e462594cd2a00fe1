#pragma once

#include <stdexcept>
#include <string>

namespace aep {

// Base for every error raised by the library. Each subclass maps onto one
// CLI exit code (see tools/aep.cpp).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Non-finite or out-of-range argument to an evaluation (x = NaN, p >= 1, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// Invalid model or algorithm parameters, malformed config documents.
class ConfigError : public Error {
public:
    using Error::Error;
};

// A request that would exceed a resource budget (BFS task memory).
class ResourceError : public Error {
public:
    using Error::Error;
};

// Operation not supported for this model (e.g. sampling a Frank copula in d=3).
class CapabilityError : public Error {
public:
    using Error::Error;
};

// Root finding could not bracket or converge. Carries the last bracket.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double low, double high)
        : Error(what), low_(low), high_(high) {}

    double low() const noexcept { return low_; }
    double high() const noexcept { return high_; }

private:
    double low_;
    double high_;
};

}  // namespace aep
