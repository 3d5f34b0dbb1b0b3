#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace scapula_ik {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateQuaternion : public Error {
 public:
  DegenerateQuaternion() : Error("cannot normalize a zero-norm quaternion") {}
};

class GimbalSingularity : public Error {
 public:
  using Error::Error;
};

class IndexOutOfRange : public Error {
 public:
  using Error::Error;
};

/// Pose input outside the measured grid while the clamp policy is Error.
class OutOfRange : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// --- motion database ingestion -------------------------------------------

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class UnitsError : public Error {
 public:
  using Error::Error;
};

class AxisMismatch : public Error {
 public:
  using Error::Error;
};

class DuplicateCell : public Error {
 public:
  using Error::Error;
};

class IncompleteGrid : public Error {
 public:
  IncompleteGrid(std::string message, std::vector<std::string> missing)
      : Error(std::move(message)), missing_(std::move(missing)) {}

  /// Missing cells rendered as "JOINT(theta,psi)".
  const std::vector<std::string>& missing() const noexcept { return missing_; }

 private:
  std::vector<std::string> missing_;
};

}  // namespace scapula_ik
