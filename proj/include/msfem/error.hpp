#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace msfem {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Iterative solver did not reach the requested tolerance.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, double residual, int iterations)
      : Error(what), residual_(residual), iterations_(iterations) {}

  double residual() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

/// Dense factorization hit a zero (or negligible) pivot, or the
/// reciprocal condition estimate fell below the configured floor.
class SingularMatrixError : public Error {
 public:
  SingularMatrixError(const std::string& what, std::size_t pivot, double rcond)
      : Error(what), pivot_(pivot), rcond_(rcond) {}

  std::size_t pivot() const noexcept { return pivot_; }
  double rcond() const noexcept { return rcond_; }

 private:
  std::size_t pivot_;
  double rcond_;
};

}  // namespace msfem
