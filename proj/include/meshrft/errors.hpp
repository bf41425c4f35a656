#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace meshrft {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad file syntax, bad flag values, mismatched lengths.
class InputError : public Error {
 public:
  using Error::Error;
};

class ParseError : public InputError {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : InputError(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class UnsupportedFeatureError : public InputError {
 public:
  using InputError::InputError;
};

class VocabularyError : public InputError {
 public:
  using InputError::InputError;
};

class LengthError : public InputError {
 public:
  using InputError::InputError;
};

class AlignmentError : public InputError {
 public:
  using InputError::InputError;
};

class MissingMetricError : public InputError {
 public:
  using InputError::InputError;
};

/// Geometry for which an operation is undefined (zero extent, zero area...).
class DegenerateGeometryError : public Error {
 public:
  using Error::Error;
};

class DegenerateQuadError : public DegenerateGeometryError {
 public:
  explicit DegenerateQuadError(std::size_t quad)
      : DegenerateGeometryError("quad " + std::to_string(quad) + " has a zero-length side"),
        quad_(quad) {}

  std::size_t quad() const noexcept { return quad_; }

 private:
  std::size_t quad_;
};

/// A metric was requested on an input where it has no value (empty mesh, empty set).
class UndefinedMetricError : public DegenerateGeometryError {
 public:
  using DegenerateGeometryError::DegenerateGeometryError;
};

class DivergenceError : public Error {
 public:
  explicit DivergenceError(std::size_t step)
      : Error("training diverged (non-finite loss) at step " + std::to_string(step)), step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

class InvariantError : public Error {
 public:
  using Error::Error;
};

}  // namespace meshrft
