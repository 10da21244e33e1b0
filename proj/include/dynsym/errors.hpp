#pragma once

#include <stdexcept>
#include <string>

namespace dynsym {

// Argument outside the domain where a routine is defined or accurate.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Integral does not exist (e.g. growing Gaussian envelope).
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Adaptive quadrature ran out of subdivisions before meeting tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double achieved_error)
      : std::runtime_error(what), achieved_error_(achieved_error) {}
  double achieved_error() const noexcept { return achieved_error_; }

 private:
  double achieved_error_;
};

// A closed form was requested for parameters outside the conventions it was
// derived under.
class ConventionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Bad user configuration. The message carries a field path or line number.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dynsym
