#pragma once

#include <stdexcept>
#include <string>

namespace symspace {

/// Thrown when a value or operand violates a mathematical precondition
/// (inversion of zero, non-prime modulus, singular matrix, ...).
struct DomainError : std::invalid_argument {
    explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

/// Thrown when finite p-adic precision is insufficient to certify a result.
/// Never a silently wrong value: if the tracked digits cannot decide a
/// question, the computation refuses to answer.
struct PrecisionError : std::runtime_error {
    explicit PrecisionError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown when a bounded search (tree apartments) exhausts its radius.
struct SearchError : std::runtime_error {
    SearchError(const std::string& what, int radius)
        : std::runtime_error(what + " (search exhausted at radius " + std::to_string(radius) + ")"),
          radius_used(radius) {}
    int radius_used;
};

} // namespace symspace
