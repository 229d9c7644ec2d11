#pragma once

#include <stdexcept>
#include <string>

namespace u1lab {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Matrix dimension is not 2^L or exceeds the dense regime.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Operands disagree on the number of sites.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Invalid run configuration: odd L, unsupported boundary, bad flags.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Parameters do not carry the requested symmetry (not critical, not a
/// U_q point, spectrum not SU(2)-compatible, ambiguous gauge).
class SymmetryError : public Error {
 public:
  using Error::Error;
};

/// Request exceeds the memory/time envelope the operation supports.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// Least-squares fit cannot be performed on the given data.
class FitError : public Error {
 public:
  using Error::Error;
};

}  // namespace u1lab
