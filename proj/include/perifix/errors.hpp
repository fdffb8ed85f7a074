#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace perifix {

// Vector lengths disagree with the object they are used against.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Malformed expression text. offset is the byte position of the problem.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : std::runtime_error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

// Runtime failure while evaluating an expression (unbound name, x/0, domain).
class EvalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Model document or model invariant violation. path names the offending field.
class ModelError : public std::runtime_error {
public:
    ModelError(const std::string& path, const std::string& what)
        : std::runtime_error(path.empty() ? what : path + ": " + what), path_(path) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

// Coupling pattern is not cyclic.
class StructureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A documented precondition of an operation does not hold.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Integration aborted. Carries the last accepted state.
class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, double t, std::vector<double> x)
        : std::runtime_error(what), t_(t), x_(std::move(x)) {}
    double last_time() const noexcept { return t_; }
    const std::vector<double>& last_state() const noexcept { return x_; }

private:
    double t_;
    std::vector<double> x_;
};

// Numerical postcondition failed (e.g. periodic orbit does not close).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace perifix
