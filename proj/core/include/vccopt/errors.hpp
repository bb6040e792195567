#pragma once

#include <stdexcept>
#include <string>

namespace vccopt {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A file could not be read or its syntax is malformed.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Well-formed input that breaks a data-model invariant. The message names
/// the violated invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A constraint system was certified infeasible (empty polytope, inconsistent
/// equalities, or a schedule that cannot absorb a job).
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// An iterative routine exhausted its iteration budget or hit a non-finite
/// value before reaching its tolerance.
class SolverFailure : public Error {
 public:
  using Error::Error;
};

/// An operation required a solved equilibrium but got an unsolved one.
class NotSolvedError : public Error {
 public:
  using Error::Error;
};

}  // namespace vccopt
