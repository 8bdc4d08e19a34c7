#pragma once

#include <stdexcept>
#include <string>

namespace teleop {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// lti
class PoleHit : public Error {
 public:
  using Error::Error;
};
class DegenerateZ : public Error {
 public:
  using Error::Error;
};
class BadGrid : public Error {
 public:
  using Error::Error;
};

// plant models
class DegenerateModel : public Error {
 public:
  using Error::Error;
};
class ImproperPlant : public Error {
 public:
  using Error::Error;
};
class SingularSlaveLoop : public Error {
 public:
  using Error::Error;
};

// stability analysis
class KernelSingular : public Error {
 public:
  using Error::Error;
};
class SingularDenominator : public Error {
 public:
  using Error::Error;
};
class AssumptionViolated : public Error {
 public:
  using Error::Error;
};

// controller / simulation
class NotYetInitialized : public Error {
 public:
  using Error::Error;
};
class NonFiniteState : public Error {
 public:
  using Error::Error;
};

/// Invariant violation on a domain value (bad gains, negative mass, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Malformed scenario text. Carries the offending line and section.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, std::string section);

  int line() const noexcept { return line_; }
  const std::string& section() const noexcept { return section_; }

 private:
  int line_;
  std::string section_;
};

}  // namespace teleop
