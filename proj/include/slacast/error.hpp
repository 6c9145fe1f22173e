#pragma once

#include <stdexcept>
#include <string>

namespace slacast {

/// Failure classes. Each maps to a distinct process exit code in the CLI.
enum class ErrorClass {
    config = 2,
    data = 3,
    divergence = 4,
    constraint = 5,
};

/// Base exception. `kind()` is a short machine-readable tag such as
/// "dataset-too-short" or "constant-feature".
class Error : public std::runtime_error {
public:
    Error(ErrorClass cls, std::string kind, const std::string& message)
        : std::runtime_error(kind + ": " + message), cls_(cls), kind_(std::move(kind)) {}

    [[nodiscard]] ErrorClass error_class() const noexcept { return cls_; }
    [[nodiscard]] const std::string& kind() const noexcept { return kind_; }

private:
    ErrorClass cls_;
    std::string kind_;
};

class ConfigError : public Error {
public:
    ConfigError(std::string kind, const std::string& message)
        : Error(ErrorClass::config, std::move(kind), message) {}
};

class DataError : public Error {
public:
    DataError(std::string kind, const std::string& message)
        : Error(ErrorClass::data, std::move(kind), message) {}
};

class DivergenceError : public Error {
public:
    DivergenceError(std::string kind, const std::string& message)
        : Error(ErrorClass::divergence, std::move(kind), message) {}
};

class ConstraintError : public Error {
public:
    ConstraintError(std::string kind, const std::string& message)
        : Error(ErrorClass::constraint, std::move(kind), message) {}
};

}  // namespace slacast
