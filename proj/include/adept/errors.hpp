#pragma once

#include <stdexcept>

namespace adept {

// Malformed experiment or class configuration. Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A reduction or oracle reached a state the algorithm rules out. Exit code 3.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Request exceeds what a brute-force path is able to handle.
class CapabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace adept
