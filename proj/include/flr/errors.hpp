#pragma once

#include <stdexcept>
#include <string>

namespace flr {

// Base of all library errors. The CLI maps the three families onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad inputs: malformed files, missing roles, mismatched shapes.
class DataError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public DataError {
 public:
  using DataError::DataError;
};

class FormatError : public DataError {
 public:
  using DataError::DataError;
};

class MissingFile : public DataError {
 public:
  MissingFile(std::string role, std::string path);
  const std::string& role() const noexcept { return role_; }
  const std::string& path() const noexcept { return path_; }

 private:
  std::string role_;
  std::string path_;
};

// Invalid arguments or configuration.
class UsageError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class SingularMatrix : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace flr
