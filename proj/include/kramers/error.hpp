#pragma once

#include <stdexcept>
#include <string>

namespace kramers {

// Every library failure derives from Error so front ends can catch once and
// map the concrete type to an exit status.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad argument outside of any physical domain (e.g. derivative order 7).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Argument outside the mathematical domain of a formula (G <= 0, z <= 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// The potential does not have the required well/barrier structure.
class StructureError : public Error {
 public:
  using Error::Error;
};

// Non-finite values or failed linear algebra.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Quantum diffusion coefficient 1 - lambda*beta*V'' crossed zero.
class SingularityError : public Error {
 public:
  using Error::Error;
};

class QuadratureError : public Error {
 public:
  using Error::Error;
};

class ExtractionError : public Error {
 public:
  using Error::Error;
};

// Scenario parsing / validation.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace kramers
