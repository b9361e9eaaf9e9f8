#ifndef SPARSESR_ERRORS_HPP
#define SPARSESR_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sparsesr {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes are incompatible.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A factorization failed or produced non-finite values.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// The nominal matrix A is not Hurwitz (assumption A1).
class StabilityAssumptionError : public Error {
 public:
  using Error::Error;
};

/// CX lost full column rank at the current (G, omega) (assumption A3).
class RankAssumptionError : public Error {
 public:
  using Error::Error;
};

/// No eigenvalue of A(Delta) sits close enough to j*omega.
class NotBoundaryPointError : public Error {
 public:
  using Error::Error;
};

/// Malformed problem or perturbation file.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace sparsesr

#endif  // SPARSESR_ERRORS_HPP
