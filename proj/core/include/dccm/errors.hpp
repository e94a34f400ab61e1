#pragma once

#include <stdexcept>
#include <string>

namespace dccm {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// W(x) could not be inverted or does not yield a positive definite metric.
class MetricError : public Error {
 public:
  using Error::Error;
};

class SingularMetric : public MetricError {
 public:
  using MetricError::MetricError;
};

class NonPositiveMetric : public MetricError {
 public:
  using MetricError::MetricError;
};

// Malformed input document; `pointer` is a JSON pointer into it and `path`
// the file it came from (empty for in-memory documents).
class FormatError : public Error {
 public:
  FormatError(const std::string& pointer, const std::string& what, const std::string& path = "")
      : Error((path.empty() ? "" : path + ": ") + (pointer.empty() ? "/" : pointer) + ": " + what),
        pointer_(pointer),
        detail_(what),
        path_(path) {}
  const std::string& pointer() const { return pointer_; }
  const std::string& detail() const { return detail_; }
  const std::string& path() const { return path_; }
  FormatError with_path(const std::string& path) const { return FormatError(pointer_, detail_, path); }

 private:
  std::string pointer_;
  std::string detail_;
  std::string path_;
};

}  // namespace dccm
