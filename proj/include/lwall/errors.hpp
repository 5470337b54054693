#pragma once

#include <stdexcept>
#include <string>

namespace lwall {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Inconsistent configuration (grid/wall mismatch, zero coupling, bad flags).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Real energy evaluated on (or too close to) a Landau level.
class PoleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A truncated series or iterative solver did not reach its tolerance.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double last_term)
        : std::runtime_error(what), last_term_(last_term) {}
    explicit ConvergenceError(const std::string& what)
        : ConvergenceError(what, 0.0) {}

    double last_term() const noexcept { return last_term_; }

private:
    double last_term_;
};

}  // namespace lwall
