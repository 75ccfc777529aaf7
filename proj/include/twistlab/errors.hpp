#pragma once

#include <stdexcept>
#include <string>

namespace twistlab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Elements or operators whose rank/group does not match their context.
class RankMismatch : public Error {
public:
  using Error::Error;
};

/// Operation requested on a cocycle variant it has no decision procedure for.
class UnsupportedVariant : public Error {
public:
  using Error::Error;
};

/// Group order, dimension, or Kronecker size beyond the configured cap.
class CapExceeded : public Error {
public:
  using Error::Error;
};

class InvalidInnerProduct : public Error {
public:
  using Error::Error;
};

class ConstructionError : public Error {
public:
  using Error::Error;
};

class OverflowError : public Error {
public:
  using Error::Error;
};

/// Malformed input (bad arguments, bad scenario documents).
class ValidationError : public Error {
public:
  using Error::Error;
};

}  // namespace twistlab
