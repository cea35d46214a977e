#pragma once

#include <stdexcept>
#include <string>

namespace jigsaw {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Image or grid dimensions violate a contract (e.g. not divisible by M).
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Invalid parameter value (quality out of range, empty list, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Grids, tables or assemblies whose shapes disagree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Malformed, truncated or unverifiable file content.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Failure reported by the JPEG / PNG codecs.
class CodecError : public Error {
 public:
  using Error::Error;
};

}  // namespace jigsaw
