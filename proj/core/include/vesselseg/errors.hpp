#pragma once

#include <stdexcept>
#include <string>

namespace vseg {

// Base class for every structured error the toolkit raises. The CLI maps
// subtypes onto its documented exit codes; anything escaping this hierarchy
// is a bug.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File and format errors ----------------------------------------------------

class IoFailure : public Error {
 public:
  using Error::Error;
};

class MalformedHeader : public Error {
 public:
  using Error::Error;
};

class UnsupportedDatatype : public Error {
 public:
  using Error::Error;
};

class TruncatedData : public Error {
 public:
  using Error::Error;
};

class BadMagic : public Error {
 public:
  using Error::Error;
};

class ChecksumMismatch : public Error {
 public:
  using Error::Error;
};

class IncompleteWeights : public Error {
 public:
  using Error::Error;
};

// Domain errors ---------------------------------------------------------------

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

class EmptyMask : public Error {
 public:
  using Error::Error;
};

class EmptyPrediction : public Error {
 public:
  using Error::Error;
};

class InvalidWindow : public Error {
 public:
  using Error::Error;
};

class OddDimension : public Error {
 public:
  using Error::Error;
};

class DegenerateSpec : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace vseg
