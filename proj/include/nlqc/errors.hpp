#pragma once

#include <stdexcept>
#include <string>

namespace nlqc {

// Incompatible matrix/vector shapes or subsystem indexing.
struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Input outside an operation's mathematical domain (non-Hermitian,
// negative spectrum, non-prime, ...).
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// Requested object exceeds the configured dense size limit.
struct SizeLimitError : std::length_error {
  using std::length_error::length_error;
};

// Numerical sanity check failed (negative probability, ...).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A constructed object violates its own invariants (POVM sum, channel
// trace preservation, ...).
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace nlqc
