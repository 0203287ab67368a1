#pragma once

#include <stdexcept>
#include <string>

namespace ptalign {

// Base class for every error raised by the library. The CLI maps the
// subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed net or graph structure (unknown places, non-bipartite arcs, ...).
class StructuralError : public Error {
 public:
  using Error::Error;
};

// A caller violated an operation's precondition (firing a disabled
// transition, k <= 0, empty trace, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Input text could not be parsed.
class ParseError : public Error {
 public:
  using Error::Error;
};

// The model breaks a working assumption: unsafe, unbounded silence,
// unbounded state space, no accepting run.
class ModelAssumptionError : public Error {
 public:
  using Error::Error;
};

}  // namespace ptalign
