#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bess {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the domain of a model function (e.g. SOC outside [0, 1]).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Invalid lookup table (duplicate breakpoint, too few points, bad CSV).
class TableError : public Error {
 public:
  using Error::Error;
};

// Discharge request beyond what the Rint circuit can deliver.
class InfeasiblePowerError : public Error {
 public:
  InfeasiblePowerError(const std::string& what, double max_power_w)
      : Error(what), max_power_w_(max_power_w) {}
  double max_power_w() const noexcept { return max_power_w_; }

 private:
  double max_power_w_;
};

// Simultaneous charge and discharge current.
class ModeViolationError : public Error {
 public:
  using Error::Error;
};

// Rejected optimization model (infeasible bounds, bad references).
class ModelError : public Error {
 public:
  using Error::Error;
};

// Assignment does not satisfy the program it is extracted from.
class ExtractionError : public Error {
 public:
  ExtractionError(const std::string& what, std::string constraint, double violation)
      : Error(what), constraint_(std::move(constraint)), violation_(violation) {}
  const std::string& constraint() const noexcept { return constraint_; }
  double violation() const noexcept { return violation_; }

 private:
  std::string constraint_;
  double violation_;
};

// Solver failure; carries where in the solve stack it happened.
class SolverError : public Error {
 public:
  using Error::Error;
};

// Scenario / CSV input problem. `line` is 0 when not applicable.
class InputError : public Error {
 public:
  InputError(const std::string& what, std::string path = {}, std::size_t line = 0)
      : Error(what), path_(std::move(path)), line_(line) {}
  const std::string& path() const noexcept { return path_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string path_;
  std::size_t line_;
};

}  // namespace bess
