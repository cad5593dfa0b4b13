#pragma once

#include <stdexcept>
#include <string>

namespace crashml {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Structural input problems: malformed CSV rows, bad headers, bad JSON.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A value outside its attribute's declared domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Violated precondition on sizes, shapes or parameter ranges.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Data too degenerate for the requested operation: a single-class dataset
/// where both classes are required, fewer distinct points than clusters,
/// an undefined metric denominator.
class DegenerateDataError : public Error {
 public:
  using Error::Error;
};

/// Operation called on an object in the wrong state, e.g. asking an
/// uncalibrated SVM for probabilities.
class StateError : public Error {
 public:
  using Error::Error;
};

/// An iterative fit exhausted its budget without converging.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace crashml
