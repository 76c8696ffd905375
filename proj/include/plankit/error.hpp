#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace plankit {

// Domain-rule failure (invalid plan, bad span, metric precondition).
// The CLI maps these to exit code 1.
class DomainError : public std::runtime_error {
public:
    DomainError(std::string kind, const std::string& message)
        : std::runtime_error(kind + ": " + message), kind_(std::move(kind)) {}

    const std::string& kind() const { return kind_; }

private:
    std::string kind_;
};

// File/format failure (unreadable WAV, bad magic, truncated stream).
// The CLI maps these to exit code 2.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace plankit
