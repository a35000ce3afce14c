#pragma once

#include <stdexcept>
#include <string>

namespace fdstab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: out-of-range indices, inconsistent shapes, bad files.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// An operation was called outside its documented domain (e.g. |z| <= 1).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Leading coefficient of a polynomial vanished (degree drops).
class DegenerateDegreeError : public Error {
 public:
  using Error::Error;
};

/// Two roots of a dispersion polynomial are closer than the separation tolerance.
class MultipleRootError : public Error {
 public:
  using Error::Error;
};

/// The per-step linear system could not be factored.
class SingularOperatorError : public Error {
 public:
  using Error::Error;
};

/// The truncated computational box is too small for the requested run.
class TruncationError : public Error {
 public:
  using Error::Error;
};

}  // namespace fdstab
