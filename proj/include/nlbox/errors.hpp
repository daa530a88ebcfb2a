#pragma once

#include <stdexcept>
#include <string>

namespace nlbox {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands disagree on party count or table shape.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A scalar or index argument lies outside the admissible range.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A box is not a member of the requested two-component family.
class NotInFamilyError : public Error {
 public:
  using Error::Error;
};

/// The structural hypothesis of a counting/planning result is not met.
class HypothesisError : public Error {
 public:
  using Error::Error;
};

/// Malformed textual input (rationals, box specification documents).
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace nlbox
