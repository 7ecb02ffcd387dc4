#pragma once

#include <stdexcept>
#include <string>

namespace gale {

// Base class for all recoverable toolkit errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Corrupt or truncated bit stream / container.
class MalformedCode : public Error {
public:
    explicit MalformedCode(const std::string& msg) : Error(msg) {}
};

// Stream header disagrees with the model/schedule supplied by the caller.
class ModelMismatch : public Error {
public:
    explicit ModelMismatch(const std::string& msg) : Error(msg) {}
};

// String fails the admission threshold; the rank is undefined.
class NotAdmitted : public Error {
public:
    explicit NotAdmitted(const std::string& msg) : Error(msg) {}
};

// Rank exceeds the admitted-set size.
class IndexOutOfRange : public Error {
public:
    explicit IndexOutOfRange(const std::string& msg) : Error(msg) {}
};

// Stream holds fewer block records than the requested prefix needs.
class InsufficientBlocks : public Error {
public:
    explicit InsufficientBlocks(const std::string& msg) : Error(msg) {}
};

// Oracle machine queried an index beyond the provided data.
class OracleExhausted : public Error {
public:
    explicit OracleExhausted(const std::string& msg) : Error(msg) {}
};

// A reduction did not reproduce the expected output.
class OutputMismatch : public Error {
public:
    explicit OutputMismatch(const std::string& msg) : Error(msg) {}
};

class ParameterOutOfRange : public Error {
public:
    explicit ParameterOutOfRange(const std::string& msg) : Error(msg) {}
};

class WeightsNotNormalized : public Error {
public:
    explicit WeightsNotNormalized(const std::string& msg) : Error(msg) {}
};

// Exhaustive evaluation requested beyond the configured bound.
class ExhaustiveBoundExceeded : public Error {
public:
    explicit ExhaustiveBoundExceeded(const std::string& msg) : Error(msg) {}
};

// Stage or node budget exhausted while searching an enumeration.
class TraversalBudgetExceeded : public Error {
public:
    explicit TraversalBudgetExceeded(const std::string& msg) : Error(msg) {}
};

class EmptyPattern : public Error {
public:
    explicit EmptyPattern(const std::string& msg) : Error(msg) {}
};

class NonPositiveInput : public Error {
public:
    explicit NonPositiveInput(const std::string& msg) : Error(msg) {}
};

}  // namespace gale
