#pragma once

#include <stdexcept>
#include <string>

namespace pcsdp {

// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A matrix argument is not symmetric or contains non-finite entries.
struct InvalidMatrix : Error { using Error::Error; };

// A matrix required to be positive semidefinite is indefinite.
struct NotPSD : Error { using Error::Error; };

// Requested shift lies inside the spectrum of the matrix.
struct ShiftInSpectrum : Error { using Error::Error; };

// base^eigenvalue exceeds the representable floating-point range.
struct Overflow : Error { using Error::Error; };

// Randomized eigenvalue estimation hit its iteration cap.
struct ConvergenceFailure : Error { using Error::Error; };

// Constraint family is empty.
struct EmptyFamily : Error { using Error::Error; };

// Ellipsoid matrix is not positive definite, or the set is malformed.
struct InvalidUncertaintySet : Error { using Error::Error; };

// Input text is not valid JSON of the expected shape.
struct ParseError : Error { using Error::Error; };

// Input parsed but violates an instance invariant (PSD, b > 0, dimensions).
struct ValidationError : Error { using Error::Error; };

// No prefix of the constraint list sums to a positive definite matrix.
struct AssumptionB1Violated : Error { using Error::Error; };

// Every constraint was dropped by the range-support filter.
struct EmptyAfterSupportFilter : Error { using Error::Error; };

// A numerical step (root bracketing, window check) failed irrecoverably.
struct NumericalFailure : Error { using Error::Error; };

// Solver exceeded its iteration safety cap.
struct IterationCapExceeded : Error {
  IterationCapExceeded(const std::string& what, long iterations)
      : Error(what), iterations(iterations) {}
  long iterations;
};

// Reference oracle limits exceeded (m > 3 or n too large).
struct TooLarge : Error { using Error::Error; };

// Dual objective is zero; gap ratio undefined.
struct DegenerateDual : Error { using Error::Error; };

}  // namespace pcsdp
