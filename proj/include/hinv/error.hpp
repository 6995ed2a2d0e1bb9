#ifndef HINV_ERROR_HPP
#define HINV_ERROR_HPP

#include <stdexcept>
#include <string>

namespace hinv {

// All library failures derive from Error so callers can catch one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid argument or violated precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Two objects describe different discretizations of the domain.
class GridMismatch : public Error {
 public:
  using Error::Error;
};

// Time stepping blew up, an iteration did not converge, etc.
class SolverError : public Error {
 public:
  using Error::Error;
};

// Malformed, truncated or corrupted file.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace hinv

#endif  // HINV_ERROR_HPP
