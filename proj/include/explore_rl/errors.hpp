#pragma once

#include <stdexcept>
#include <string>

namespace explore_rl {

// Caller violated a documented precondition (bad index, parameter out of range).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An MDP failed validation while being loaded or constructed.
class InvalidMdpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Experiment configuration rejected; `field()` names the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field.empty() ? message : field + ": " + message),
        field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace explore_rl
