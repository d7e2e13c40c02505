#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace elc {

/// Base of every error thrown by the library. `code()` is a stable,
/// machine-readable identifier used in CLI error objects.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

/// Malformed input text (expressions, signatures, Euler-ring elements).
class ParseError : public Error {
public:
    ParseError(std::string code, const std::string& message, std::size_t offset)
        : Error(std::move(code), message + " at offset " + std::to_string(offset)),
          offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Evaluation left the real-analytic domain of the potential.
class DomainError : public Error {
public:
    DomainError(const std::string& message, std::size_t offset)
        : Error("domain_fault", message), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// A hypothesis required for the certificate does not hold.
class HypothesisError : public Error {
public:
    using Error::Error;
};

/// Numerical machinery (Newton, integrator, continuation) failed.
class SolverError : public Error {
public:
    using Error::Error;
};

}  // namespace elc
