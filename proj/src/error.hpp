#pragma once

#include <stdexcept>
#include <string>

namespace hamreach {

// Base for everything thrown by this library.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed source text; carries a 0-based character offset.
struct ParseError : Error {
  ParseError(const std::string& msg, std::size_t pos)
      : Error(msg + " (at position " + std::to_string(pos) + ")"), position(pos) {}
  std::size_t position;
};

// Evaluation left the function's domain (division by zero and friends).
struct DomainError : Error {
  using Error::Error;
};

// Two expressions live on different manifolds, or a point has the wrong shape.
struct ManifoldError : Error {
  using Error::Error;
};

// Implicit solver failed to converge or a trajectory left the bounding box.
struct IntegrationError : Error {
  using Error::Error;
};

// Bad argument to an operation (k < 2, non-compact grid without box, ...).
struct InvalidArgument : Error {
  using Error::Error;
};

}  // namespace hamreach
