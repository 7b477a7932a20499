#pragma once

#include <stdexcept>
#include <string>

namespace bandgap {

/// Invalid input to a constructor or operation (violated precondition).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical step failed: Cholesky breakdown, missing bracket, non-monotone errors.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Experiment configuration could not be parsed or validated.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
    if (!condition) throw DomainError(message);
}

} // namespace detail
} // namespace bandgap
