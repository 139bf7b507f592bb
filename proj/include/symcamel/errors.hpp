#pragma once

#include <stdexcept>
#include <string>

namespace symcamel {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidDimension : public Error {
 public:
  using Error::Error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Raised when a positive-definite block fails factorization or its
/// reciprocal condition estimate drops below the configured floor.
class SingularBlock : public Error {
 public:
  SingularBlock(const std::string& what, double rcond) : Error(what), rcond_(rcond) {}
  double rcond() const noexcept { return rcond_; }

 private:
  double rcond_;
};

class OutOfRange : public Error {
 public:
  using Error::Error;
};

/// Two independent routes to the same quantity disagreed beyond tolerance.
class NumericalInconsistency : public Error {
 public:
  using Error::Error;
};

}  // namespace symcamel
