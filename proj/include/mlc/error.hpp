#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace mlc {

enum class ErrorKind {
  Argument,
  Validation,
  Format,
  Io,
  Singularity,
  DegenerateGeometry,
  InsufficientCoverage,
  InconsistentBoundaries,
  State,
  Generation,
};

const char* to_string(ErrorKind kind);

// Base of every exception thrown by the library. The kind drives the CLI exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

struct ArgumentError : Error {
  explicit ArgumentError(const std::string& w) : Error(ErrorKind::Argument, w) {}
};
struct ValidationError : Error {
  explicit ValidationError(const std::string& w) : Error(ErrorKind::Validation, w) {}
};
struct FormatError : Error {
  explicit FormatError(const std::string& w) : Error(ErrorKind::Format, w) {}
};
struct IoError : Error {
  explicit IoError(const std::string& w) : Error(ErrorKind::Io, w) {}
};
struct SingularityError : Error {
  explicit SingularityError(const std::string& w) : Error(ErrorKind::Singularity, w) {}
};
struct DegenerateGeometryError : Error {
  explicit DegenerateGeometryError(const std::string& w) : Error(ErrorKind::DegenerateGeometry, w) {}
};
struct InconsistentBoundariesError : Error {
  explicit InconsistentBoundariesError(const std::string& w)
      : Error(ErrorKind::InconsistentBoundaries, w) {}
};
struct StateError : Error {
  explicit StateError(const std::string& w) : Error(ErrorKind::State, w) {}
};
struct GenerationError : Error {
  explicit GenerationError(const std::string& w) : Error(ErrorKind::Generation, w) {}
};

class InsufficientCoverageError : public Error {
 public:
  InsufficientCoverageError(const std::string& w, std::vector<std::size_t> columns)
      : Error(ErrorKind::InsufficientCoverage, w), columns_(std::move(columns)) {}
  const std::vector<std::size_t>& columns() const { return columns_; }

 private:
  std::vector<std::size_t> columns_;
};

}  // namespace mlc
