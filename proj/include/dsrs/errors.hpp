#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dsrs {

/// Base class for every error raised by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input table. Positions are 1-based; row 1 is the header.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t row, std::size_t column)
        : Error(what + " (row " + std::to_string(row) + ", column " +
                std::to_string(column) + ")"),
          row_(row),
          column_(column) {}

    std::size_t row() const noexcept { return row_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t row_;
    std::size_t column_;
};

/// A column with zero sample variance where variation is required.
class ConstantColumnError : public Error {
public:
    explicit ConstantColumnError(const std::string& what) : Error(what) {}
};

/// Linearly dependent predictors detected during factorization.
class CollinearityError : public Error {
public:
    CollinearityError(const std::string& what, std::size_t column)
        : Error(what), column_(column) {}

    /// Index of the first column implicated in the dependency.
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t column_;
};

/// Too few observations for the requested model size.
class InsufficientDataError : public Error {
public:
    explicit InsufficientDataError(const std::string& what) : Error(what) {}
};

/// A required feature value was not supplied.
class MissingFeatureError : public Error {
public:
    explicit MissingFeatureError(const std::string& feature)
        : Error("missing feature: " + feature), feature_(feature) {}

    const std::string& feature() const noexcept { return feature_; }

private:
    std::string feature_;
};

/// Input that admits no meaningful result (e.g. clustering identical scores).
class DegenerateInputError : public Error {
public:
    explicit DegenerateInputError(const std::string& what) : Error(what) {}
};

/// A documented precondition was violated by the caller.
class ContractViolationError : public Error {
public:
    explicit ContractViolationError(const std::string& what) : Error(what) {}
};

/// Failure inside a named pipeline stage.
class PipelineError : public Error {
public:
    PipelineError(const std::string& stage, const std::string& what)
        : Error("[" + stage + "] " + what), stage_(stage) {}

    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

}  // namespace dsrs
