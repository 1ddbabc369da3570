#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace faasprof {

// Root of every exception the library throws on purpose. The C API maps each
// subclass onto one fp_status code.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Invalid or inconsistent declarative input (campaign/training configs,
// workflow definitions). May carry several diagnostics at once.
class ConfigError : public Error {
public:
  explicit ConfigError(const std::string& message) : Error(message), issues_{message} {}
  explicit ConfigError(std::vector<std::string> issues)
      : Error(join(issues)), issues_(std::move(issues)) {}

  const std::vector<std::string>& issues() const noexcept { return issues_; }

private:
  static std::string join(const std::vector<std::string>& issues) {
    std::string out;
    for (const auto& s : issues) {
      if (!out.empty()) out += "\n";
      out += s;
    }
    return out;
  }

  std::vector<std::string> issues_;
};

// A parallelism level above nodes x cores_per_node of the chosen resource.
class CapacityError : public ConfigError {
public:
  using ConfigError::ConfigError;
};

// Bad tabular data: missing columns, non-numeric cells, invalid transforms.
class DataError : public Error {
public:
  using Error::Error;
};

// Linear solves and other numerical failures.
class NumericError : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

// Persisted model files.
class FormatError : public Error {
public:
  using Error::Error;
};
class VersionError : public FormatError {
public:
  using FormatError::FormatError;
};
class ChecksumError : public FormatError {
public:
  using FormatError::FormatError;
};

// Campaign checkpoint inconsistencies (digest mismatch on resume).
class StateError : public Error {
public:
  using Error::Error;
};

}  // namespace faasprof
