#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pcr {

/// Root of every error raised by the library. The CLI maps any `Error` to
/// exit status 1 with `what()` as the one-line diagnostic.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed JSON. `offset` is the byte position reported by the parser.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : Error(what), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Well-formed input that violates a data-model invariant. `element` names
/// the offending node id, edge endpoint or field.
class ValidationError : public Error {
public:
    ValidationError(const std::string& what, std::string element)
        : Error(what), element_(std::move(element)) {}

    const std::string& element() const noexcept { return element_; }

private:
    std::string element_;
};

class NotFoundError : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    DimensionError(std::size_t expected, std::size_t actual)
        : Error("dimension mismatch: expected " + std::to_string(expected) +
                ", got " + std::to_string(actual)),
          expected_(expected), actual_(actual) {}

    std::size_t expected() const noexcept { return expected_; }
    std::size_t actual() const noexcept { return actual_; }

private:
    std::size_t expected_;
    std::size_t actual_;
};

class EmptyCorpusError : public Error {
public:
    EmptyCorpusError() : Error("cannot build a lexical index over an empty corpus") {}
};

class EmptyInputError : public Error {
public:
    using Error::Error;
};

/// Failure inside an embedding provider. Transient failures (timeouts,
/// HTTP 429 / 5xx) set `retryable`.
class ProviderError : public Error {
public:
    ProviderError(const std::string& what, bool retryable)
        : Error(what), retryable_(retryable) {}

    bool retryable() const noexcept { return retryable_; }

private:
    bool retryable_;
};

/// Paired differences with zero variance; the t statistic is undefined.
class DegenerateVarianceError : public Error {
public:
    explicit DegenerateVarianceError(double mean_diff)
        : Error("paired differences have zero variance (mean diff " +
                std::to_string(mean_diff) + ")"),
          mean_diff_(mean_diff) {}

    double mean_diff() const noexcept { return mean_diff_; }

private:
    double mean_diff_;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace pcr
