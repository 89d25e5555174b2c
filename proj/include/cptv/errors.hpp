#pragma once

#include <stdexcept>
#include <string>

namespace cptv {

// Invalid configuration: bad shapes, bad option values, malformed files.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A coordinate or time lies outside the problem domain.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// API misuse, e.g. differentiating a node that is not on the tape.
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A derivative order the engine does not provide.
class UnsupportedOrderError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Non-finite values encountered during numerical work.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cptv
