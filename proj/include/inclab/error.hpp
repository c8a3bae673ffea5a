#pragma once

#include <stdexcept>
#include <string>

namespace inclab {

// Invalid probability, schedule or distribution parameter.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Calibration produced a degenerate or infeasible payment schedule.
class CalibrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Task bank could not be built or loaded.
class SelectionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Statistical procedure is undefined for the supplied data.
class StatsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace inclab
