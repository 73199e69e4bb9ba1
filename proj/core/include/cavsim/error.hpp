#pragma once

#include <stdexcept>
#include <string>

namespace cavsim {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad or incomplete configuration input.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A diagnostic formula evaluated at one of its poles (Delta_a = 0, delta = 0).
class SingularityError : public Error {
 public:
  using Error::Error;
};

// Moment state left the physical range by more than the abort tolerance.
class PhysicalityError : public Error {
 public:
  using Error::Error;
};

// Step-size underflow or other failure of the time stepper.
class IntegrationError : public Error {
 public:
  using Error::Error;
};

}  // namespace cavsim
