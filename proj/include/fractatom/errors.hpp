#pragma once

#include <stdexcept>
#include <string>

namespace fractatom {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (r <= 0, x <= 0, NaN, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Fractality violates the embedding bound d_v <= 3, d_s <= 2.
class ScenarioConstraintError : public Error {
 public:
  using Error::Error;
};

/// Interaction exponent kappa is (numerically) zero; the power-law form is undefined.
class DegenerateExponentError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Input sits on (or within the guard band of) the scale-free locus kappa = 2(d_v - d_s).
class ScaleFreeSingularityError : public Error {
 public:
  using Error::Error;
};

/// Input is on the unstable side of the scale-free locus; no bound spectrum exists.
class InstabilityError : public Error {
 public:
  using Error::Error;
};

/// No classically allowed region at the requested energy.
class NoBoundStateError : public Error {
 public:
  using Error::Error;
};

class QuadratureError : public Error {
 public:
  using Error::Error;
};

/// Root bracketing or iterative refinement failed.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Shooting grid does not extend far enough past the outer turning point.
class GridTooSmallError : public Error {
 public:
  using Error::Error;
};

}  // namespace fractatom
