#pragma once

#include <stdexcept>
#include <string>

namespace fabcr {

/// Raised when an iterative solve fails to bracket or converge. Carries the
/// parameter value at which it happened so callers can report it.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double at, std::string diagnostics = {})
      : std::runtime_error(what), at_(at), diagnostics_(std::move(diagnostics)) {}

  double at() const noexcept { return at_; }
  const std::string& diagnostics() const noexcept { return diagnostics_; }

 private:
  double at_;
  std::string diagnostics_;
};

/// A confidence-region endpoint could not be bracketed within the search cap.
class OpenRegionError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// The requested operation needs a model property the model does not have
/// (e.g. asymptotic limits of a prior with Gaussian-tailed marginal).
class UnsupportedModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace fabcr
