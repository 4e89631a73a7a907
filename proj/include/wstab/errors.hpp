#pragma once

#include <stdexcept>
#include <string>

namespace wstab {

// Base of every library error. The CLI maps subclasses onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InputError : public Error {  // violated operation precondition on arguments
 public:
  using Error::Error;
};

class SingularBoundaryError : public Error {
 public:
  using Error::Error;
};

class ImmersionError : public Error {
 public:
  using Error::Error;
};

class MeshingError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace wstab
