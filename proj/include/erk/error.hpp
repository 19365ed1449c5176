#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace erk {

/// Coarse failure category. The CLI prints it as the first token of its
/// one-line error message, so the spelling is part of the interface.
enum class ErrorKind { validation, lookup, domain, convergence, config, io };

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// A state entry outside the operator's admissible set.
class DomainError : public Error {
 public:
  DomainError(int species, int cell, double value, const std::string& what)
      : Error(ErrorKind::domain, what), species_(species), cell_(cell), value_(value) {}

  int species() const noexcept { return species_; }
  int cell() const noexcept { return cell_; }
  double value() const noexcept { return value_; }

 private:
  int species_;
  int cell_;
  double value_;
};

/// Newton failed to reach the residual tolerance. `step` is set when the
/// failure happened inside a time loop.
class ConvergenceError : public Error {
 public:
  ConvergenceError(double residual, int iterations, const std::string& what,
                   std::optional<int> step = std::nullopt)
      : Error(ErrorKind::convergence, what),
        residual_(residual), iterations_(iterations), step_(step) {}

  double residual() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }
  std::optional<int> step() const noexcept { return step_; }

 private:
  double residual_;
  int iterations_;
  std::optional<int> step_;
};

}  // namespace erk
