#pragma once

#include <stdexcept>
#include <string>

namespace stripgreen {

/// Input outside an operation's mathematical domain (t <= 0, pole of sigma, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A numerical procedure could not reach its requested accuracy.
class AccuracyError : public std::runtime_error {
public:
    AccuracyError(const std::string& what, double achieved)
        : std::runtime_error(what + " (achieved error estimate " + std::to_string(achieved) + ")"),
          achieved_(achieved) {}

    double achieved() const noexcept { return achieved_; }

private:
    double achieved_;
};

/// Fixed-point iteration exhausted its iteration budget.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, int iterations, double last_increment)
        : std::runtime_error(what + " after " + std::to_string(iterations) +
                             " iterations, last increment " + std::to_string(last_increment)),
          iterations_(iterations),
          last_increment_(last_increment) {}

    int iterations() const noexcept { return iterations_; }
    double last_increment() const noexcept { return last_increment_; }

private:
    int iterations_;
    double last_increment_;
};

/// Invalid configuration (grid too coarse, unstable time step, bad parameter block).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Non-finite data produced by a user callable.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace stripgreen
