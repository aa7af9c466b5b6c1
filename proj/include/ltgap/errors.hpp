#pragma once

#include <stdexcept>
#include <string>

namespace ltgap {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A shifted factorization produced a pivot below the shift tolerance, i.e. the
/// shift is numerically an eigenvalue. Callers nudge the shift and retry.
class SingularShift : public Error {
 public:
  SingularShift(const std::string& what, double shift) : Error(what), shift_(shift) {}
  double shift() const noexcept { return shift_; }

 private:
  double shift_;
};

/// A genericity hypothesis (energy off a spectrum, gap disjoint from a
/// spectrum, ...) does not hold for the given inputs.
class HypothesisViolation : public Error {
 public:
  using Error::Error;
};

class NotPsd : public Error {
 public:
  using Error::Error;
};

class EigenvalueInBand : public Error {
 public:
  using Error::Error;
};

class ClosedGap : public Error {
 public:
  using Error::Error;
};

class DegenerateEdge : public Error {
 public:
  using Error::Error;
};

class QuadratureFailure : public Error {
 public:
  using Error::Error;
};

class IntegrationFailure : public Error {
 public:
  using Error::Error;
};

class DivergenceSuspected : public Error {
 public:
  using Error::Error;
};

class BranchSelectionFailure : public Error {
 public:
  using Error::Error;
};

class DefinitionMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace ltgap
