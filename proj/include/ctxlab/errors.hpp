#pragma once

#include <stdexcept>
#include <string>

namespace ctxlab {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes or dimensions of the arguments do not fit together.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// An input object failed validation (non-normalized rows, broken equivalences, ...).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A configured combinatorial or iteration budget was exceeded.
class ResourceError : public Error {
 public:
  using Error::Error;
};

}  // namespace ctxlab
