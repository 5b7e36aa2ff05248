#pragma once

#include <stdexcept>
#include <string>

namespace lowdisc {

// Every failure the toolkit reports derives from Error; the CLI maps the
// concrete type to an exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Width mismatches, malformed containers, out-of-range ids.
class StructuralError : public Error {
 public:
  using Error::Error;
};

// Arguments outside an operation's mathematical domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Instance generation could not satisfy its post-conditions.
class GenerationError : public Error {
 public:
  using Error::Error;
};

// An operation's stated precondition does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// The partial-coloring walk exhausted its retry budget.
class WalkFailure : public Error {
 public:
  using Error::Error;
};

// An internal invariant was violated. Indicates a bug.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace lowdisc
