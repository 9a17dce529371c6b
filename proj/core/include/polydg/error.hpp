#pragma once

#include <stdexcept>
#include <string>

namespace polydg {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Inconsistent or degenerate geometry (non-abutting boxes, bad cells, mismatched interface traces).
class GeometryError : public Error {
public:
  using Error::Error;
};

/// A structurally invalid mesh file or mesh description.
class ValidationError : public Error {
public:
  using Error::Error;
};

/// Bad arguments to numerical routines (unsupported degree, shape mismatch, ...).
class InvalidArgument : public Error {
public:
  using Error::Error;
};

/// Linear solver failure or non-finite state during time stepping.
class SolverError : public Error {
public:
  using Error::Error;
};

/// Invalid run configuration.
class ConfigError : public Error {
public:
  using Error::Error;
};

#define POLYDG_THROW_IF(cond, ExceptionType, msg) \
  do {                                            \
    if (cond) throw ExceptionType(msg);           \
  } while (false)

}  // namespace polydg
