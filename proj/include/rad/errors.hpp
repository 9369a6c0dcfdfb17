#ifndef RAD_ERRORS_HPP
#define RAD_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace rad {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad user input: malformed files, dimension mismatches, invalid
/// configuration. Maps to exit code 1 in the CLI.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Broken internal invariant or numerical failure (e.g. solver divergence).
/// Maps to exit code 2 in the CLI.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace rad

#endif  // RAD_ERRORS_HPP
