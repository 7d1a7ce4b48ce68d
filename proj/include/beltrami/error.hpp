#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace beltrami {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidGrid : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class InvariantViolation : public Error {
 public:
  using Error::Error;
};

/// Iterative procedure stopped before meeting its tolerance. Carries the last
/// estimate so callers can still report it.
class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, double partial, double error)
      : Error(what), partial_(partial), error_(error) {}

  double partial() const noexcept { return partial_; }
  double error() const noexcept { return error_; }

 private:
  double partial_;
  double error_;
};

class ContractionViolation : public Error {
 public:
  using Error::Error;
};

class DegenerateJacobian : public Error {
 public:
  using Error::Error;
};

class PaddingError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Configuration validation failure listing every offending field.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> problems)
      : Error(join(problems)), problems_(std::move(problems)) {}

  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  static std::string join(const std::vector<std::string>& items) {
    std::string out = "invalid configuration:";
    for (const auto& item : items) {
      out += "\n  - ";
      out += item;
    }
    return out;
  }

  std::vector<std::string> problems_;
};

}  // namespace beltrami
