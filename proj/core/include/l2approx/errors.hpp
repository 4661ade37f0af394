#pragma once

#include <stdexcept>
#include <string>

namespace l2approx {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// Malformed periodic-complex document or dangling reference.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Boundary data whose composite boundary is nonzero.
class ChainComplexError : public Error {
 public:
  using Error::Error;
};

class SpectrumError : public Error {
 public:
  using Error::Error;
};

}  // namespace l2approx
