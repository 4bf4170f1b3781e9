#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace thermistor {

/// Invalid configuration or unknown catalog entry.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Mismatched grids or level counts between arguments.
class ContractError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Tridiagonal elimination hit a (near-)zero pivot.
class SingularSystemError : public std::runtime_error {
public:
    explicit SingularSystemError(const std::string& what, std::ptrdiff_t level = -1)
        : std::runtime_error(what), level_(level) {}

    /// Time level at which the step system failed, or -1 when not inside a time loop.
    std::ptrdiff_t level() const noexcept { return level_; }

private:
    std::ptrdiff_t level_;
};

/// A field left the finite range (or exceeded the divergence threshold).
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(const std::string& what, std::ptrdiff_t level)
        : std::runtime_error(what), level_(level) {}

    std::ptrdiff_t level() const noexcept { return level_; }

private:
    std::ptrdiff_t level_;
};

/// The brute-force reference solver failed to converge.
class OracleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace thermistor
