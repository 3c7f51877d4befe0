#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace declab {

// Precondition violated on a mathematical object (bad time, wrong dimension, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Requested parameter regime is outside what the implementation covers (alpha = 1).
class UnsupportedError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An orbit failed to return to the inducing set within the configured cap.
class NonReturnError : public std::runtime_error {
 public:
  NonReturnError(const std::string& what, std::size_t steps)
      : std::runtime_error(what), steps_(steps) {}
  std::size_t steps() const noexcept { return steps_; }

 private:
  std::size_t steps_;
};

class DegenerateProfileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid experiment configuration; `field` is a JSON-pointer-like path.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& msg)
      : std::invalid_argument(field + ": " + msg), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace declab
