#pragma once

#include <stdexcept>
#include <string>

namespace gcb {

/// Base class of every exception thrown by the library.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// (alpha, beta) lies outside the parameter region an operation requires.
class domain_error : public error {
 public:
  using error::error;
};

/// A routine was called on a subtree that does not meet its documented input contract.
class precondition_error : public error {
 public:
  using error::error;
};

/// Inserting would push the root weight past `max_weight`.
class capacity_error : public error {
 public:
  using error::error;
};

/// A rotation needed a child or grandchild that does not exist.
class degenerate_structure_error : public error {
 public:
  using error::error;
};

/// An audit check failed (case exclusivity, path robustness, constant ranges).
class invariant_violation : public error {
 public:
  using error::error;
};

}  // namespace gcb
