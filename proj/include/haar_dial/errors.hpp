#pragma once

#include <stdexcept>
#include <string>

namespace haar_dial {

// Dimension or index mismatch between operands.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Argument outside the domain of a density, sampler, or mapping.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A CircuitSpec or gate list violates one of its invariants.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Numerically singular input (rank-deficient QR, zero pivot).
class DegenerateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A file could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace haar_dial
