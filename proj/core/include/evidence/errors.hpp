#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace evidence {

// Base for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Cholesky broke down; `minor` is the 1-based order of the leading minor
// that was not positive.
class NotPositiveDefinite : public Error {
 public:
  NotPositiveDefinite(std::size_t minor, const std::string& context);
  std::size_t minor() const noexcept { return minor_; }

 private:
  std::size_t minor_;
};

class ConvergenceFailure : public Error {
 public:
  using Error::Error;
};

class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace evidence
