#pragma once

#include <stdexcept>
#include <string>

namespace resbg {

// Base of every error thrown by the toolkit. The CLI maps subclasses onto
// exit codes (validation -> 2, numerical nonconvergence -> 3).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Physical parameters that cannot describe a resonance (e.g. Γ0 = 0).
class InvalidSpec : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of a density or transform.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Configuration is valid physics but not covered by the machinery
/// (more than two channels for the (t0, r0) reduction).
class UnsupportedConfiguration : public Error {
 public:
  UnsupportedConfiguration(const std::string& what, double eta, double gamma)
      : Error(what), eta_(eta), gamma_(gamma) {}

  // The partial reduction that is still well defined.
  double eta() const noexcept { return eta_; }
  double gamma() const noexcept { return gamma_; }

 private:
  double eta_;
  double gamma_;
};

/// ε0 hit an eigenvalue of the background at zero absorption.
class SingularSystem : public Error {
 public:
  using Error::Error;
};

/// Too few samples to build an empirical P0.
class CalibrationError : public Error {
 public:
  CalibrationError(const std::string& what, std::size_t required)
      : Error(what), required_(required) {}
  std::size_t required() const noexcept { return required_; }

 private:
  std::size_t required_;
};

/// A consistency check was applied to a point it does not describe.
class InapplicableCheck : public Error {
 public:
  using Error::Error;
};

/// A sample file's manifest does not match the requested run.
class ManifestMismatch : public Error {
 public:
  using Error::Error;
};

class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& what, double partial, double estimate)
      : Error(what), partial_(partial), estimate_(estimate) {}
  double partial_value() const noexcept { return partial_; }
  double error_estimate() const noexcept { return estimate_; }

 private:
  double partial_;
  double estimate_;
};

}  // namespace resbg
