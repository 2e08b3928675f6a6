#pragma once

#include <stdexcept>
#include <string>

namespace rhsim {

/// Raised when a configuration value violates its contract. `key()` names the
/// offending configuration key so front ends can report it verbatim.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::invalid_argument(key + ": " + message), key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace rhsim
