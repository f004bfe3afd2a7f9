#pragma once

#include <stdexcept>
#include <string>

namespace polorient {

// Error categories map one-to-one onto CLI exit codes.
enum class ErrorKind { kConfig = 2, kData = 3, kInternal = 4 };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::kConfig, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::kData, what) {}
};

// Both annotators constant and identical: chance agreement is 1 and kappa is undefined.
class DegenerateAgreementError : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace polorient
