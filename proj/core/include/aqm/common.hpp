#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace aqm {

using ClassId = std::uint32_t;
using QuestionId = std::uint32_t;
using AnswerId = std::uint32_t;
using FeatureId = std::uint32_t;

/// Thrown when an input violates a documented precondition. The message names
/// the offending field.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed or unsupported world/model/config file.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bayes update whose elementwise product has no mass left.
class DegenerateEvidence : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// The question pool for the current turn is empty.
class NoCandidates : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace aqm
