#pragma once

#include <stdexcept>
#include <string>

namespace geovad {

// Base class for every error raised by the library. CLI maps these to exit
// code 2 (data error); anything else is a bug.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ZeroVectorError : public Error {
 public:
  using Error::Error;
};

class AntipodalPointError : public Error {
 public:
  using Error::Error;
};

class AtBasePointError : public Error {
 public:
  using Error::Error;
};

class DegenerateMeanError : public Error {
 public:
  using Error::Error;
};

class HemisphereViolationError : public Error {
 public:
  using Error::Error;
};

class EmptyBankError : public Error {
 public:
  using Error::Error;
};

class TooFewPointsError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatchError : public Error {
 public:
  using Error::Error;
};

class OutOfIntervalError : public Error {
 public:
  using Error::Error;
};

class DegenerateVarianceError : public Error {
 public:
  using Error::Error;
};

class SingleClassError : public Error {
 public:
  using Error::Error;
};

class NoPositivesError : public Error {
 public:
  using Error::Error;
};

class BadMagicError : public Error {
 public:
  using Error::Error;
};

class TruncatedFileError : public Error {
 public:
  using Error::Error;
};

class NonFiniteValueError : public Error {
 public:
  using Error::Error;
};

class UnknownKeyError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace geovad
