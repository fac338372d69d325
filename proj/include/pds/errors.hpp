#pragma once
// ============================================================================
// Typed errors shared across the library. Everything a caller might want to
// branch on gets its own type; free-form context goes in what().
// ============================================================================

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pds {

struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ResourceError : std::runtime_error {
    explicit ResourceError(const std::string& msg) : std::runtime_error(msg) {}
};

// Expression parsing: position is a byte offset into the input.
struct ParseError : std::runtime_error {
    size_t pos;
    ParseError(const std::string& msg, size_t at)
        : std::runtime_error(msg + " (at position " + std::to_string(at) + ")"), pos(at) {}
};

// Scalar division left a remainder; index = offending coefficient power.
struct NonIntegralDivision : std::runtime_error {
    int index;
    NonIntegralDivision(const std::string& msg, int idx)
        : std::runtime_error(msg + " (coefficient index " + std::to_string(idx) + ")"),
          index(idx) {}
};

// A root system was asked about a prime it has no certified root for.
struct UncertifiedPrime : std::runtime_error {
    unsigned long p;
    size_t poly_index;
    UncertifiedPrime(unsigned long p_, size_t i)
        : std::runtime_error("no certified root at prime " + std::to_string(p_) +
                             " for polynomial #" + std::to_string(i)),
          p(p_), poly_index(i) {}
};

struct InvalidPartition : std::runtime_error {
    size_t slot;
    InvalidPartition(const std::string& msg, size_t s)
        : std::runtime_error(msg + " (slot " + std::to_string(s) + ")"), slot(s) {}
};

struct PreconditionViolated : std::runtime_error {
    explicit PreconditionViolated(const std::string& msg) : std::runtime_error(msg) {}
};

struct QuadratureFailure : std::runtime_error {
    explicit QuadratureFailure(const std::string& msg) : std::runtime_error(msg) {}
};

struct WeightContractViolated : std::runtime_error {
    long long q, r;
    WeightContractViolated(long long q_, long long r_)
        : std::runtime_error("weight contract b(q*r) >= b(r)/q violated at q=" +
                             std::to_string(q_) + " r=" + std::to_string(r_)),
          q(q_), r(r_) {}
};

// An internal consistency check failed mid-run; indicates a bug, not bad input.
struct ValidationFailure : std::runtime_error {
    explicit ValidationFailure(const std::string& msg) : std::runtime_error(msg) {}
};

struct ConstructionRejected : std::runtime_error {
    explicit ConstructionRejected(const std::string& msg) : std::runtime_error(msg) {}
};

struct UnsupportedSystem : std::runtime_error {
    explicit UnsupportedSystem(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace pds
