#pragma once

#include <stdexcept>
#include <string>

namespace envimp {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input (shapes, intervals, degrees).
class InvalidInput : public Error {
public:
  using Error::Error;
};

class DimensionMismatch : public InvalidInput {
public:
  using InvalidInput::InvalidInput;
};

/// A file could not be read or written.
class IoError : public Error {
public:
  using Error::Error;
};

/// The weight polynomial w vanishes (numerically) at a point that is used.
class DenominatorNearZero : public Error {
public:
  using Error::Error;
};

class DegenerateImage : public Error {
public:
  using Error::Error;
};

class DegenerateTriangle : public Error {
public:
  using Error::Error;
};

/// SVD did not converge or produced non-finite values.
class NumericalFailure : public Error {
public:
  using Error::Error;
};

/// No envelope points in the searched region, or a requested center is off it.
class EmptyZeroSet : public Error {
public:
  using Error::Error;
};

}  // namespace envimp
