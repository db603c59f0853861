#pragma once

#include <stdexcept>
#include <string>

namespace odflow {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite coordinates, malformed datasets, out-of-range ids.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A numeric parameter outside its admissible range (lambda <= 0, r < 0, ...).
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// The requested closed form only exists for a different DistanceSpec.
class UnsupportedMetric : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

/// Every nearest-neighbour distance is zero, so the intensity is unbounded.
class DegenerateIntensity : public Error {
 public:
  using Error::Error;
};

class GenerationError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file. The message names the file and the 1-based line.
class ParseError : public Error {
 public:
  ParseError(const std::string& file, std::size_t line, const std::string& what)
      : Error(file + ":" + std::to_string(line) + ": " + what), file_(file), line_(line) {}

  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

}  // namespace odflow
