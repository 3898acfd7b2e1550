#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace gauduchon {

// Root of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad input: shape mismatch, index out of range, invalid parameter.
class ArgumentError : public Error {
public:
    using Error::Error;
};

// A top-degree form used as a volume vanishes somewhere.
class SingularVolumeError : public Error {
public:
    SingularVolumeError(const std::string& what, std::size_t point)
        : Error(what), point_(point) {}
    std::size_t point() const noexcept { return point_; }

private:
    std::size_t point_;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : Error(what + " at offset " + std::to_string(offset)), detail_(what), offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }
    // The message without the offset suffix.
    const std::string& detail() const noexcept { return detail_; }

private:
    std::string detail_;
    std::size_t offset_;
};

// An expression evaluated outside its domain at some grid point. `offset` is the
// byte offset of the offending operator or call in the source text.
class EvaluationError : public Error {
public:
    EvaluationError(const std::string& what, std::size_t offset, std::size_t point)
        : Error(what + " at offset " + std::to_string(offset) + " (grid point " + std::to_string(point) + ")"),
          offset_(offset), point_(point) {}
    std::size_t offset() const noexcept { return offset_; }
    std::size_t point() const noexcept { return point_; }

private:
    std::size_t offset_;
    std::size_t point_;
};

// Structure equations of a coframe algebra violate d^2 = 0 for some generator.
class IntegrabilityError : public Error {
public:
    IntegrabilityError(const std::string& generator, const std::string& detail)
        : Error("integrability fails for generator '" + generator + "': " + detail),
          generator_(generator) {}
    const std::string& generator() const noexcept { return generator_; }

private:
    std::string generator_;
};

class NotInvariantError : public Error {
public:
    using Error::Error;
};

// Continuation or bisection gave up. `history` holds one human-readable line per attempt.
class NonconvergenceError : public Error {
public:
    NonconvergenceError(const std::string& what, std::vector<std::string> history)
        : Error(what), history_(std::move(history)) {}
    const std::vector<std::string>& history() const noexcept { return history_; }

private:
    std::vector<std::string> history_;
};

}  // namespace gauduchon
