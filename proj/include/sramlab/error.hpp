#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace sramlab {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, std::string token, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what + " near '" + token + "'"),
          line_(line),
          token_(std::move(token)) {}

    [[nodiscard]] std::size_t line() const { return line_; }
    [[nodiscard]] const std::string& token() const { return token_; }

private:
    std::size_t line_;
    std::string token_;
};

/// Broken circuit invariant (duplicate name, unknown model, bad geometry).
class CircuitError : public Error {
public:
    using Error::Error;
};

class InvalidGeometry : public Error {
public:
    using Error::Error;
};

class HarnessError : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double best_residual,
                     std::vector<std::string> trace)
        : Error(what), best_residual_(best_residual), trace_(std::move(trace)) {}

    [[nodiscard]] double best_residual() const { return best_residual_; }
    [[nodiscard]] const std::vector<std::string>& trace() const { return trace_; }

private:
    double best_residual_;
    std::vector<std::string> trace_;
};

/// Precondition or structural failure inside a stability analysis.
class AnalysisError : public Error {
public:
    using Error::Error;
};

/// File could not be written or read.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace sramlab
