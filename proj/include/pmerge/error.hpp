#ifndef PMERGE_ERROR_HPP
#define PMERGE_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pmerge {

// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// An argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

// Length or dimension mismatch between collaborating values.
class ShapeError : public Error {
public:
    using Error::Error;
};

// A caller-side requirement (e.g. enough replications) was not met.
class PreconditionError : public Error {
public:
    using Error::Error;
};

// A numerical routine could not reach its target tolerance.
class AccuracyError : public Error {
public:
    AccuracyError(const std::string& what, double achieved)
        : Error(what + " (achieved tolerance " + std::to_string(achieved) + ")"),
          achieved_(achieved) {}

    double achieved() const noexcept { return achieved_; }

private:
    double achieved_;
};

// Malformed model or statistic specification string.
class ParseError : public Error {
public:
    ParseError(std::size_t position, const std::string& expected, const std::string& input)
        : Error("parse error at position " + std::to_string(position) + ": expected " + expected +
                " in '" + input + "'"),
          position_(position),
          expected_(expected) {}

    std::size_t position() const noexcept { return position_; }
    const std::string& expected() const noexcept { return expected_; }

private:
    std::size_t position_;
    std::string expected_;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace pmerge

#endif // PMERGE_ERROR_HPP
