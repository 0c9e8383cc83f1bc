#pragma once

#include <stdexcept>
#include <string>

namespace wgd {

// Base for every error raised by the toolkit. The CLI maps subclasses to exit
// codes (input errors -> 2, infeasible -> 3, anything else -> 4).
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Malformed or out-of-contract arguments.
class ArgumentError : public Error
{
public:
    using Error::Error;
};

// A value outside the sampled domain of an interpolated table.
class RangeError : public Error
{
public:
    RangeError(const std::string &what, double lo, double hi)
        : Error(what + " (valid interval [" + std::to_string(lo) + ", " + std::to_string(hi) + "])"),
          lo_(lo), hi_(hi)
    {
    }

    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }

    /// Same error with context prepended to the message.
    RangeError prefixed(const std::string &context) const { return RangeError(context + what(), lo_, hi_, 0); }

private:
    RangeError(const std::string &full, double lo, double hi, int) : Error(full), lo_(lo), hi_(hi) {}

    double lo_;
    double hi_;
};

// No design, radius or geometry satisfies the requested constraint.
class InfeasibleError : public Error
{
public:
    using Error::Error;
};

class CalibrationError : public Error
{
public:
    using Error::Error;
};

class BudgetError : public Error
{
public:
    using Error::Error;
};

class GeometryError : public InfeasibleError
{
public:
    using InfeasibleError::InfeasibleError;
};

// Parse failure in a text input, with 1-based position.
class ParseError : public Error
{
public:
    ParseError(const std::string &source, size_t line, size_t column, const std::string &msg)
        : Error(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
          line_(line), column_(column)
    {
    }

    size_t line() const noexcept { return line_; }
    size_t column() const noexcept { return column_; }

private:
    size_t line_;
    size_t column_;
};

} // namespace wgd
