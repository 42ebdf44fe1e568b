#pragma once

#include <stdexcept>
#include <string>

namespace stringdyn {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input; `path` names the offending field.
class ValidationError : public Error {
 public:
  ValidationError(std::string path, const std::string& reason)
      : Error(path + ": " + reason), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class AmbientMismatch : public Error {
 public:
  using Error::Error;
};

// Internal schedule ran out; indicates a bug rather than bad input.
class BoundExhausted : public Error {
 public:
  using Error::Error;
};

class CertificateFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace stringdyn
