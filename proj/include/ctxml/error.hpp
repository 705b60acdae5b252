#pragma once

#include <stdexcept>
#include <string>

namespace ctxml {

// Precondition or input validation failure.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed configuration file; message carries the location when known.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The feasibility solver hit its iteration cap.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite loss or gradient during training.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ctxml
