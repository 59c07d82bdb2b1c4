#pragma once

#include <stdexcept>
#include <string>

namespace enstat {

/// Base class for every error the library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File could not be opened or read.
class IoError : public Error {
public:
    using Error::Error;
};

/// Malformed input text (bad CSV row, unparsable timestamp). Carries a line number.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Header does not match the expected schema.
class SchemaError : public Error {
public:
    using Error::Error;
};

/// Structurally valid input that violates a dataset invariant (duplicate
/// timestamp, unknown variable, missing model input).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public Error {
public:
    using Error::Error;
};

/// An iterative numeric routine failed to converge.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Too few observations for the requested statistic.
class InsufficientDataError : public Error {
public:
    using Error::Error;
};

/// Design matrix is rank deficient; the message names the dependent column.
class CollinearityError : public Error {
public:
    using Error::Error;
};

/// A grouping scheme produced fewer than two groups or an empty group.
class GroupingError : public Error {
public:
    using Error::Error;
};

/// Analysis-level failure not covered by a more specific category.
class AnalysisError : public Error {
public:
    using Error::Error;
};

}  // namespace enstat
